#include "zipfmf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "zipfmf/errors.hpp"
#include "zipfmf/powerlaw.hpp"
#include "text_util.hpp"

namespace zipfmf {

double evaluate_mae(const FactorModel& model, const RatingsDataset& test) {
    if (test.ratings.empty()) throw Error("evaluate_mae: empty test set");
    if (test.num_users != model.num_users || test.num_items != model.num_items)
        throw Error("evaluate_mae: model and test dimensions differ");

    double abs_sum = 0.0;
    for (const Rating& r : test.ratings)
        abs_sum += std::fabs(r.value - predict_rating(model, r.user, r.item));
    return abs_sum / static_cast<double>(test.ratings.size());
}

double evaluate_precision_at_k(const FactorModel& model,
                               const RatingsDataset& test, int top_k) {
    if (top_k < 1) throw Error("evaluate_precision_at_k: top_k must be >= 1");
    if (test.num_users != model.num_users || test.num_items != model.num_items)
        throw Error("evaluate_precision_at_k: model and test dimensions differ");

    std::vector<std::vector<Rating>> per_user(
        static_cast<std::size_t>(test.num_users));
    for (const Rating& r : test.ratings) per_user[r.user].push_back(r);

    double precision_sum = 0.0;
    std::int64_t users_scored = 0;
    for (std::int32_t i = 0; i < test.num_users; ++i) {
        auto& items = per_user[i];
        if (items.empty()) continue;

        std::sort(items.begin(), items.end(),
                  [&](const Rating& a, const Rating& b) {
                      const double sa = cosine_score(model, i, a.item);
                      const double sb = cosine_score(model, i, b.item);
                      if (sa != sb) return sa > sb;
                      return a.item < b.item;
                  });
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(top_k), items.size());
        std::int64_t relevant = 0;
        for (std::size_t p = 0; p < take; ++p)
            relevant += items[p].value >= 4.0 ? 1 : 0;
        precision_sum += static_cast<double>(relevant) / static_cast<double>(take);
        ++users_scored;
    }
    if (users_scored == 0)
        throw Error("evaluate_precision_at_k: no user has test items");
    return precision_sum / static_cast<double>(users_scored);
}

namespace {

constexpr double kStage1LearningRate = 1e-4;

struct RunSpec {
    std::string method;  // "vanilla" or "zipf"
    double learning_rate = 0.0;
    double beta = 0.0;
    std::uint32_t seed = 0;
};

bool row_matches(const SweepRow& row, const RunSpec& spec,
                 const SweepOptions& options) {
    return row.method == spec.method && row.learning_rate == spec.learning_rate &&
           row.beta == spec.beta && row.latent_dim == options.latent_dim &&
           row.epochs == options.epochs && row.seed == spec.seed;
}

TrainConfig run_config(const RunSpec& spec, const SweepOptions& options) {
    TrainConfig config;
    config.learning_rate = spec.learning_rate;
    config.zipf_beta = spec.method == "zipf" ? spec.beta : 0.0;
    config.epochs = options.epochs;
    config.latent_dim = options.latent_dim;
    config.rng_seed = spec.seed;
    config.log_guard = options.log_guard;
    return config;
}

TrainConfig stage1_config(const SweepOptions& options, double learning_rate,
                          std::uint32_t seed) {
    TrainConfig config;
    config.learning_rate = learning_rate;
    config.zipf_beta = 0.0;
    config.epochs = options.epochs;
    config.latent_dim = options.latent_dim;
    config.rng_seed = seed;
    config.log_guard = options.log_guard;
    return config;
}

SweepRow execute_run(const DataSplit& data, const RunSpec& spec,
                     const SweepOptions& options,
                     const AlphaCoefficients* shared_alpha) {
    SweepRow row;
    row.method = spec.method;
    row.learning_rate = spec.learning_rate;
    row.beta = spec.method == "zipf" ? spec.beta : 0.0;
    row.latent_dim = options.latent_dim;
    row.epochs = options.epochs;
    row.seed = spec.seed;

    const auto started = std::chrono::steady_clock::now();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        TrainResult trained;
        if (spec.method == "zipf") {
            AlphaCoefficients local;
            const AlphaCoefficients* alpha = shared_alpha;
            if (alpha == nullptr) {
                local = estimate_alpha(
                    data.train,
                    stage1_config(options, spec.learning_rate, spec.seed),
                    options.top_k, options.lasso_lambda);
                alpha = &local;
            }
            trained = train_zipf(data.train, run_config(spec, options), *alpha);
        } else {
            trained = train_vanilla(data.train, run_config(spec, options));
        }

        row.mae_test = evaluate_mae(trained.model, data.test);
        OccurrenceProfile profile =
            occurrence_profile(trained.model, options.top_k);
        row.coverage = profile.coverage;
        try {
            row.matthew_degree_s = matthew_degree_from_counts(profile.counts);
        } catch (const DegenerateDistribution&) {
            row.matthew_degree_s = nan;
            row.status = "degenerate";
        }
    } catch (const Diverged&) {
        row.mae_test = nan;
        row.matthew_degree_s = nan;
        row.coverage = 0;
        row.status = "diverged";
    } catch (const NumericalDegeneracy&) {
        row.mae_test = nan;
        row.matthew_degree_s = nan;
        row.coverage = 0;
        row.status = "degenerate";
    }
    row.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return row;
}

// Runs the given specs, reusing rows from options.report_path when the full
// (method, lr, beta, dim, epochs, seed) key matches. Returns rows in spec
// order; the report file additionally keeps unmatched pre-existing rows.
SweepReport run_specs(const DataSplit& data, const std::vector<RunSpec>& specs,
                      const SweepOptions& options) {
    if (options.jobs < 1) throw Error("sweep: jobs must be >= 1");
    if (options.top_k < 1) throw Error("sweep: top_k must be >= 1");

    SweepReport previous;
    if (!options.report_path.empty() &&
        std::filesystem::exists(options.report_path))
        previous = read_report_csv(options.report_path);

    std::vector<SweepRow> rows(specs.size());
    std::vector<bool> done(specs.size(), false);
    std::vector<bool> consumed(previous.rows.size(), false);
    for (std::size_t s = 0; s < specs.size(); ++s) {
        for (std::size_t p = 0; p < previous.rows.size(); ++p) {
            if (consumed[p]) continue;
            if (row_matches(previous.rows[p], specs[s], options)) {
                rows[s] = previous.rows[p];
                done[s] = true;
                consumed[p] = true;
                break;
            }
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t s = 0; s < specs.size(); ++s)
        if (!done[s]) pending.push_back(s);

    const AlphaCoefficients* shared_alpha = nullptr;
    AlphaCoefficients shared_storage;
    if (!options.alpha_per_run) {
        bool any_zipf = false;
        for (std::size_t s : pending) any_zipf |= specs[s].method == "zipf";
        if (any_zipf) {
            shared_storage = estimate_alpha(
                data.train, stage1_config(options, kStage1LearningRate, options.seed),
                options.top_k, options.lasso_lambda);
            shared_alpha = &shared_storage;
        }
    }

    const int workers =
        std::max(1, std::min<int>(options.jobs,
                                  static_cast<int>(pending.size())));
    if (workers <= 1) {
        for (std::size_t s : pending)
            rows[s] = execute_run(data, specs[s], options, shared_alpha);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t p = next.fetch_add(1);
                if (p >= pending.size()) return;
                try {
                    rows[pending[p]] =
                        execute_run(data, specs[pending[p]], options, shared_alpha);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    SweepReport report;
    report.rows = rows;
    if (!options.report_path.empty()) {
        SweepReport merged;
        merged.rows = rows;
        for (std::size_t p = 0; p < previous.rows.size(); ++p)
            if (!consumed[p]) merged.rows.push_back(previous.rows[p]);
        write_report_csv(merged, options.report_path);
    }
    return report;
}

}  // namespace

SweepReport run_lr_sweep(const DataSplit& data,
                         const std::vector<double>& lr_grid, double beta_fixed,
                         const SweepOptions& options) {
    if (lr_grid.empty()) throw Error("run_lr_sweep: empty learning-rate grid");
    if (!(beta_fixed > 0.0))
        throw Error("run_lr_sweep: beta_fixed must be positive");
    std::vector<RunSpec> specs;
    specs.reserve(lr_grid.size() * 2);
    for (double lr : lr_grid) {
        specs.push_back(RunSpec{"vanilla", lr, 0.0, options.seed});
        specs.push_back(RunSpec{"zipf", lr, beta_fixed, options.seed});
    }
    return run_specs(data, specs, options);
}

SweepReport run_beta_sweep(const DataSplit& data,
                           const std::vector<double>& beta_grid,
                           double lr_fixed, const SweepOptions& options) {
    if (beta_grid.empty()) throw Error("run_beta_sweep: empty beta grid");
    if (!(lr_fixed > 0.0)) throw Error("run_beta_sweep: lr_fixed must be positive");
    std::vector<RunSpec> specs;
    specs.reserve(beta_grid.size() + 1);
    specs.push_back(RunSpec{"vanilla", lr_fixed, 0.0, options.seed});
    for (double beta : beta_grid) {
        if (beta < 0.0) throw Error("run_beta_sweep: beta must be >= 0");
        specs.push_back(RunSpec{"zipf", lr_fixed, beta, options.seed});
    }
    return run_specs(data, specs, options);
}

SweepReport run_matthew_comparison(const DataSplit& data, double lr_fixed,
                                   const std::vector<double>& beta_grid,
                                   const SweepOptions& options) {
    if (beta_grid.empty())
        throw Error("run_matthew_comparison: empty beta grid");
    if (!(lr_fixed > 0.0))
        throw Error("run_matthew_comparison: lr_fixed must be positive");
    std::vector<RunSpec> specs;
    specs.reserve(beta_grid.size() + 1);
    specs.push_back(RunSpec{"vanilla", lr_fixed, 0.0, options.seed});
    for (double beta : beta_grid) {
        if (!(beta > 0.0))
            throw Error("run_matthew_comparison: betas must be positive");
        specs.push_back(RunSpec{"zipf", lr_fixed, beta, options.seed});
    }
    return run_specs(data, specs, options);
}

std::vector<double> default_lr_grid() {
    return {1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
}

std::vector<double> default_beta_grid() {
    return {0.0, 1e-5, 3e-5, 5e-5, 7e-5, 1e-4, 3e-4, 7e-4, 1e-3, 3e-3};
}

void write_report_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_report_csv: cannot open " + path);
    out << "method,learning_rate,beta,latent_dim,epochs,seed,mae_test,"
           "matthew_degree_s,coverage,wall_time_seconds,status\n";
    for (const SweepRow& row : report.rows) {
        out << row.method << ',' << detail::format_double(row.learning_rate)
            << ',' << detail::format_double(row.beta) << ',' << row.latent_dim
            << ',' << row.epochs << ',' << row.seed << ','
            << detail::format_double(row.mae_test) << ','
            << detail::format_double(row.matthew_degree_s) << ',' << row.coverage
            << ',' << detail::format_double(row.wall_time_seconds) << ','
            << row.status << '\n';
    }
    if (!out) throw Error("write_report_csv: write failed for " + path);
}

namespace {

double parse_double_field(const std::string& field, const std::string& where) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw ParseError("read_report_csv: bad number at " + where);
    return value;
}

long parse_int_field(const std::string& field, const std::string& where) {
    char* end = nullptr;
    const long value = std::strtol(field.c_str(), &end, 10);
    if (end == field.c_str() || *end != '\0')
        throw ParseError("read_report_csv: bad integer at " + where);
    return value;
}

}  // namespace

SweepReport read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_report_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("read_report_csv: empty file " + path);
    const std::vector<std::string> expected = {
        "method",          "learning_rate", "beta",
        "latent_dim",      "epochs",        "seed",
        "mae_test",        "matthew_degree_s", "coverage",
        "wall_time_seconds", "status"};
    if (detail::split_csv_line(line) != expected)
        throw ParseError("read_report_csv: bad header in " + path);

    SweepReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != expected.size())
            throw ParseError("read_report_csv: expected 11 fields at " + where);

        SweepRow row;
        row.method = fields[0];
        if (row.method != "vanilla" && row.method != "zipf")
            throw ParseError("read_report_csv: unknown method at " + where);
        row.learning_rate = parse_double_field(fields[1], where);
        row.beta = parse_double_field(fields[2], where);
        row.latent_dim = static_cast<int>(parse_int_field(fields[3], where));
        row.epochs = static_cast<int>(parse_int_field(fields[4], where));
        row.seed = static_cast<std::uint32_t>(parse_int_field(fields[5], where));
        row.mae_test = parse_double_field(fields[6], where);
        row.matthew_degree_s = parse_double_field(fields[7], where);
        row.coverage = static_cast<std::int32_t>(parse_int_field(fields[8], where));
        row.wall_time_seconds = parse_double_field(fields[9], where);
        row.status = fields[10];
        if (row.status != "ok" && row.status != "diverged" &&
            row.status != "degenerate")
            throw ParseError("read_report_csv: unknown status at " + where);
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace zipfmf
