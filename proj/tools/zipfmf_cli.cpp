// Command-line frontend: train and evaluate factor models, estimate the
// per-user rank coefficients, run comparison sweeps and measure output
// concentration. Every subcommand accepts --config FILE with key=value
// lines; explicit flags win over file values.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zipfmf/alpha.hpp"
#include "zipfmf/data.hpp"
#include "zipfmf/errors.hpp"
#include "zipfmf/experiments.hpp"
#include "zipfmf/model.hpp"
#include "zipfmf/powerlaw.hpp"
#include "zipfmf/train.hpp"
#include "text_util.hpp"

namespace {

using zipfmf::detail::format_double;

struct CommonArgs {
    std::string data_dir;
    double test_fraction = 0.2;
    std::uint32_t seed = 42;
    int dim = 50;
    int epochs = 50;
    double lr = 1e-4;
    double beta = 0.0;
    double lambda = 0.1;
    int topk = 10;
    double log_guard = 1e-3;
    int jobs = 1;
};

// Shared options live on the root app; subcommands inherit them through
// fallthrough, so both `zipfmf --dim 8 train` and `zipfmf train --dim 8`
// work and a --config file can set them for any subcommand.
void add_shared_flags(CLI::App& app, CommonArgs& args) {
    app.add_option("--data-dir", args.data_dir,
                   "Directory holding ratings.csv (and optionally movies.csv)");
    app.add_option("--test-fraction", args.test_fraction,
                   "Held-out fraction of ratings");
    app.add_option("--seed", args.seed, "Seed for the split and the trainer");
    app.add_option("--dim", args.dim, "Latent dimension");
    app.add_option("--epochs", args.epochs, "Training epochs");
    app.add_option("--lr", args.lr, "SGD learning rate");
    app.add_option("--topk", args.topk, "Recommendation list length K");
    app.add_option("--lambda", args.lambda,
                   "L1 weight for coefficient estimation");
    app.add_option("--log-guard", args.log_guard,
                   "Skip the penalty when |ln(alpha_i*t0/n)| is below this");
    app.add_option("--jobs", args.jobs, "Worker threads");
}

zipfmf::DataSplit load_split(const CommonArgs& args) {
    namespace fs = std::filesystem;
    if (args.data_dir.empty())
        throw zipfmf::Error("this subcommand needs --data-dir");
    const fs::path dir(args.data_dir);
    const fs::path ratings = dir / "ratings.csv";
    if (!fs::exists(ratings))
        throw zipfmf::Error("no ratings.csv under " + args.data_dir);
    const fs::path movies = dir / "movies.csv";
    zipfmf::RatingsDataset dataset = zipfmf::load_movielens(
        ratings.string(), fs::exists(movies) ? movies.string() : "");
    return zipfmf::split(dataset, args.test_fraction,
                         static_cast<int>(args.seed));
}

zipfmf::TrainConfig train_config(const CommonArgs& args) {
    zipfmf::TrainConfig config;
    config.learning_rate = args.lr;
    config.zipf_beta = args.beta;
    config.epochs = args.epochs;
    config.latent_dim = args.dim;
    config.rng_seed = args.seed;
    config.log_guard = args.log_guard;
    return config;
}

void print_kv(const char* key, const std::string& value) {
    std::printf("%s=%s\n", key, value.c_str());
}

void print_kv(const char* key, double value) {
    print_kv(key, format_double(value));
}

void cmd_train(const CommonArgs& args, const std::string& alpha_path,
               const std::string& model_out, const std::string& trace_out) {
    zipfmf::DataSplit data = load_split(args);
    zipfmf::TrainConfig config = train_config(args);

    zipfmf::TrainResult result;
    if (args.beta > 0.0) {
        zipfmf::AlphaCoefficients alpha;
        if (!alpha_path.empty()) {
            alpha = zipfmf::read_alpha_csv(alpha_path);
        } else {
            zipfmf::TrainConfig stage1 = config;
            stage1.zipf_beta = 0.0;
            stage1.learning_rate = 1e-4;
            alpha = zipfmf::estimate_alpha(data.train, stage1, args.topk,
                                           args.lambda);
            print_kv("alpha_source", std::string("estimated"));
        }
        result = zipfmf::train_zipf(data.train, config, alpha);
    } else {
        result = zipfmf::train_vanilla(data.train, config);
    }

    if (!model_out.empty()) zipfmf::save_model(result.model, model_out);
    if (!trace_out.empty()) zipfmf::write_trace_csv(result.trace, trace_out);

    print_kv("train_samples", std::to_string(data.train.ratings.size()));
    print_kv("final_train_loss", result.trace.back().train_loss);
    print_kv("penalty_fire_fraction", result.trace.back().penalty_fire_fraction);
    print_kv("test_mae", zipfmf::evaluate_mae(result.model, data.test));
}

void cmd_alpha(const CommonArgs& args, const std::string& out) {
    zipfmf::DataSplit data = load_split(args);
    zipfmf::TrainConfig stage1 = train_config(args);
    stage1.zipf_beta = 0.0;

    zipfmf::TrainResult trained = zipfmf::train_vanilla(data.train, stage1);
    zipfmf::RankTargets targets = zipfmf::rank_targets(trained.model, args.topk);
    zipfmf::DesignMatrix design = zipfmf::build_design(trained.model);
    zipfmf::LassoResult solved =
        zipfmf::solve_lasso(design, targets.targets, args.lambda);

    zipfmf::AlphaCoefficients alpha;
    alpha.alpha = solved.coefficients;
    alpha.lasso_lambda = args.lambda;
    alpha.source_model_hash = zipfmf::model_hash(trained.model);
    zipfmf::write_alpha_csv(alpha, out);

    std::int64_t nonzero = 0;
    for (double a : alpha.alpha) nonzero += a != 0.0 ? 1 : 0;
    print_kv("lasso_converged", std::string(solved.converged ? "true" : "false"));
    print_kv("lasso_sweeps", std::to_string(solved.sweeps));
    print_kv("lasso_objective", solved.objective_history.back());
    print_kv("lasso_max_kkt_violation", solved.max_kkt_violation);
    print_kv("alpha_nonzero", std::to_string(nonzero));
    print_kv("alpha_out", out);
}

void cmd_eval(const CommonArgs& args, const std::string& model_path) {
    zipfmf::DataSplit data = load_split(args);
    zipfmf::FactorModel model = zipfmf::load_model(model_path);

    print_kv("test_mae", zipfmf::evaluate_mae(model, data.test));
    print_kv("precision_at_k",
             zipfmf::evaluate_precision_at_k(model, data.test, args.topk));
    zipfmf::OccurrenceProfile profile =
        zipfmf::occurrence_profile(model, args.topk, args.jobs);
    print_kv("coverage", std::to_string(profile.coverage));
    try {
        print_kv("matthew_degree_s",
                 zipfmf::matthew_degree_from_counts(profile.counts));
    } catch (const zipfmf::DegenerateDistribution&) {
        print_kv("matthew_degree_s", std::string("degenerate"));
    }
}

void cmd_measure(const CommonArgs& args, const std::string& model_path,
                 const std::string& out) {
    zipfmf::FactorModel model = zipfmf::load_model(model_path);
    zipfmf::OccurrenceProfile profile =
        zipfmf::occurrence_profile(model, args.topk, args.jobs);
    if (!out.empty()) zipfmf::write_occurrence_csv(profile, out);

    print_kv("top_k", std::to_string(profile.top_k));
    print_kv("coverage", std::to_string(profile.coverage));
    try {
        print_kv("matthew_degree_s",
                 zipfmf::matthew_degree_from_counts(profile.counts));
    } catch (const zipfmf::DegenerateDistribution&) {
        print_kv("matthew_degree_s", std::string("degenerate"));
    }
}

void print_report(const zipfmf::SweepReport& report) {
    for (const zipfmf::SweepRow& row : report.rows)
        std::printf("method=%s lr=%s beta=%s seed=%u mae=%s s=%s coverage=%d status=%s\n",
                    row.method.c_str(), format_double(row.learning_rate).c_str(),
                    format_double(row.beta).c_str(), row.seed,
                    format_double(row.mae_test).c_str(),
                    format_double(row.matthew_degree_s).c_str(), row.coverage,
                    row.status.c_str());
}

zipfmf::SweepOptions sweep_options(const CommonArgs& args, bool alpha_per_run,
                                   const std::string& out) {
    zipfmf::SweepOptions options;
    options.latent_dim = args.dim;
    options.epochs = args.epochs;
    options.seed = args.seed;
    options.top_k = args.topk;
    options.lasso_lambda = args.lambda;
    options.log_guard = args.log_guard;
    options.alpha_per_run = alpha_per_run;
    options.jobs = args.jobs;
    options.report_path = out;
    return options;
}

std::vector<double> positive_betas(const std::vector<double>& grid) {
    std::vector<double> out;
    for (double b : grid)
        if (b > 0.0) out.push_back(b);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix factorization with a Zipf popularity penalty"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read shared defaults from a key=value file");

    CommonArgs args;
    std::string alpha_path;
    std::string model_path;
    std::string model_out;
    std::string trace_out;
    std::string out;
    bool alpha_per_run = false;
    double sweep_lr_beta = 1e-3;
    std::vector<double> lr_grid = zipfmf::default_lr_grid();
    std::vector<double> beta_grid = zipfmf::default_beta_grid();

    add_shared_flags(app, args);

    CLI::App* train = app.add_subcommand("train", "Train one model");
    train->add_option("--beta", args.beta, "Penalty weight; 0 trains plain MF");
    train->add_option("--alpha", alpha_path, "Coefficient CSV for the penalty");
    train->add_option("--model-out", model_out, "Write the trained model here");
    train->add_option("--trace-out", trace_out, "Write the per-epoch trace CSV");

    CLI::App* alpha = app.add_subcommand(
        "alpha", "Estimate per-user rank coefficients by lasso");
    alpha->add_option("--out", out, "Coefficient CSV path")->required();

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a saved model");
    eval->add_option("--model", model_path, "Model file")->required();

    CLI::App* sweep_lr = app.add_subcommand(
        "sweep-lr", "Compare both methods across learning rates");
    CLI::App* sweep_beta = app.add_subcommand(
        "sweep-beta", "Sweep the penalty weight at a fixed learning rate");
    CLI::App* sweep_matthew = app.add_subcommand(
        "sweep-matthew", "Compare output concentration against a vanilla reference");
    for (CLI::App* cmd : {sweep_lr, sweep_beta, sweep_matthew}) {
        cmd->add_option("--out", out, "Report CSV; existing rows are reused");
        cmd->add_flag("--alpha-per-run", alpha_per_run,
                      "Re-estimate alpha for every configuration");
    }
    sweep_lr->add_option("--lrs", lr_grid, "Learning-rate grid")
        ->delimiter(',');
    sweep_lr->add_option("--beta", sweep_lr_beta, "Fixed penalty weight");
    sweep_beta->add_option("--betas", beta_grid, "Penalty grid (may include 0)")
        ->delimiter(',');
    sweep_matthew->add_option("--betas", beta_grid, "Penalty grid (positive)")
        ->delimiter(',');

    CLI::App* measure = app.add_subcommand(
        "measure", "Occurrence profile and Matthew degree of a saved model");
    measure->add_option("--model", model_path, "Model file")->required();
    measure->add_option("--out", out, "Occurrence CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            cmd_train(args, alpha_path, model_out, trace_out);
        } else if (alpha->parsed()) {
            cmd_alpha(args, out);
        } else if (eval->parsed()) {
            cmd_eval(args, model_path);
        } else if (sweep_lr->parsed()) {
            if (!(sweep_lr_beta > 0.0))
                throw zipfmf::Error("sweep-lr: --beta must be positive");
            print_report(zipfmf::run_lr_sweep(
                load_split(args), lr_grid, sweep_lr_beta,
                sweep_options(args, alpha_per_run, out)));
        } else if (sweep_beta->parsed()) {
            print_report(zipfmf::run_beta_sweep(
                load_split(args), beta_grid, args.lr,
                sweep_options(args, alpha_per_run, out)));
        } else if (sweep_matthew->parsed()) {
            print_report(zipfmf::run_matthew_comparison(
                load_split(args), args.lr, positive_betas(beta_grid),
                sweep_options(args, alpha_per_run, out)));
        } else if (measure->parsed()) {
            cmd_measure(args, model_path, out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
