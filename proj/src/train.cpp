#include "zipfmf/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "zipfmf/alpha.hpp"
#include "zipfmf/errors.hpp"
#include "text_util.hpp"

namespace zipfmf {

namespace {

struct SampleEval {
    double loss = 0.0;
    bool penalty_active = false;
};

// Loss and (optionally) gradients for one training triple. gu/gv are
// either both null or both d-length buffers. Gradients are taken at the
// current parameters; the penalty uses alpha_i*t0 as the per-sample
// surrogate for the item's output rank.
SampleEval eval_sample(const FactorModel& model, std::int32_t i, std::int32_t j,
                       double r_norm, const AlphaCoefficients* alpha,
                       double beta, std::int32_t n_items, double log_guard,
                       double* gu, double* gv) {
    auto ui = model.user_row(i);
    auto vj = model.item_row(j);
    const std::int32_t d = model.dim;

    double t0 = 0.0, usq = 0.0, vsq = 0.0;
    for (std::int32_t k = 0; k < d; ++k) {
        t0 += ui[k] * vj[k];
        usq += ui[k] * ui[k];
        vsq += vj[k] * vj[k];
    }
    const double t1 = std::sqrt(usq);
    const double t2 = std::sqrt(vsq);
    if (t1 < kMinRowNorm || t2 < kMinRowNorm)
        throw NumericalDegeneracy("sample: factor row norm underflow");
    const double t3 = t1 * t2;
    const double diff = r_norm - t0 / t3;

    SampleEval eval;
    eval.loss = diff * diff;

    double penalty_coeff = 0.0;
    if (beta > 0.0 && alpha != nullptr) {
        const double surrogate = alpha->alpha[i] * t0;
        if (surrogate > 0.0) {
            const double lg = std::log(surrogate / n_items);
            if (std::fabs(lg) >= log_guard) {
                eval.penalty_active = true;
                eval.loss -= beta * (1.0 + n_items / lg);
                penalty_coeff = beta * n_items / (lg * lg * t0);
            }
        }
    }

    if (gu != nullptr) {
        const double t4 = 2.0 * diff;
        const double u_from_v = -t4 / t3;
        const double u_from_u = t4 * t0 / (t1 * t1 * t1 * t2);
        const double v_from_v = t4 * t0 / (t2 * t2 * t2 * t1);
        for (std::int32_t k = 0; k < d; ++k) {
            gu[k] = u_from_v * vj[k] + u_from_u * ui[k];
            gv[k] = u_from_v * ui[k] + v_from_v * vj[k];
        }
        if (eval.penalty_active) {
            for (std::int32_t k = 0; k < d; ++k) {
                gu[k] += penalty_coeff * vj[k];
                gv[k] += penalty_coeff * ui[k];
            }
        }
    }
    return eval;
}

void check_sample_args(const FactorModel& model, std::int32_t i, std::int32_t j,
                       double r_norm, const AlphaCoefficients* alpha,
                       double beta, std::int32_t n_items, double log_guard) {
    if (i < 0 || i >= model.num_users || j < 0 || j >= model.num_items)
        throw Error("sample: index out of range");
    if (!(r_norm > 0.0 && r_norm <= 1.0))
        throw Error("sample: r_norm must lie in (0,1]");
    if (beta < 0.0) throw Error("sample: beta must be >= 0");
    if (!(log_guard > 0.0)) throw Error("sample: log_guard must be positive");
    if (n_items < 1) throw Error("sample: n_items must be >= 1");
    if (beta > 0.0) {
        if (alpha == nullptr) throw Error("sample: beta > 0 requires alpha");
        if (static_cast<std::int32_t>(alpha->alpha.size()) != model.num_users)
            throw Error("sample: alpha length must equal the number of users");
    }
}

void check_config(const TrainConfig& config) {
    if (!(config.learning_rate > 0.0)) throw Error("train: learning_rate must be positive");
    if (config.zipf_beta < 0.0) throw Error("train: zipf_beta must be >= 0");
    if (config.epochs < 1) throw Error("train: epochs must be >= 1");
    if (config.latent_dim < 1) throw Error("train: latent_dim must be >= 1");
    if (!(config.log_guard > 0.0)) throw Error("train: log_guard must be positive");
}

// Re-draw rows whose norm collapsed; NaN rows pass through untouched so
// the epoch-end divergence check can report them.
void rejitter_if_degenerate(std::span<double> row, std::mt19937& rng) {
    double sq = 0.0;
    for (double c : row) sq += c * c;
    if (sq < kMinRowNorm * kMinRowNorm) {
        std::uniform_real_distribution<double> entry(0.1, 0.9);
        for (double& c : row) c = entry(rng);
    }
}

TrainResult train_impl(const RatingsDataset& train, const TrainConfig& config,
                       const AlphaCoefficients* alpha) {
    check_config(config);
    if (train.ratings.empty()) throw Error("train: empty training set");
    const double beta = config.zipf_beta;
    if (beta > 0.0) {
        if (alpha == nullptr) throw Error("train: zipf_beta > 0 requires alpha");
        if (static_cast<std::int32_t>(alpha->alpha.size()) != train.num_users)
            throw Error("train: alpha length must equal the number of users");
    }

    TrainResult result;
    result.model = init_model(train.num_users, train.num_items,
                              config.latent_dim, config.rng_seed, train.scale);
    FactorModel& model = result.model;

    std::vector<std::uint32_t> order(train.ratings.size());
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937 shuffle_rng(config.rng_seed);
    std::mt19937 jitter_rng(config.rng_seed ^ 0x9e3779b9u);

    std::vector<double> gu(static_cast<std::size_t>(config.latent_dim));
    std::vector<double> gv(static_cast<std::size_t>(config.latent_dim));
    const double lr = config.learning_rate;
    const double inv_rmax = 1.0 / train.scale.max;
    const double sample_count = static_cast<double>(train.ratings.size());

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.shuffle_each_epoch)
            std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        std::int64_t fired = 0;
        for (std::uint32_t idx : order) {
            const Rating& r = train.ratings[idx];
            SampleEval eval =
                eval_sample(model, r.user, r.item, r.value * inv_rmax, alpha,
                            beta, train.num_items, config.log_guard,
                            gu.data(), gv.data());
            loss_sum += eval.loss;
            fired += eval.penalty_active ? 1 : 0;

            auto ui = model.user_row(r.user);
            auto vj = model.item_row(r.item);
            for (std::int32_t k = 0; k < config.latent_dim; ++k) ui[k] -= lr * gu[k];
            for (std::int32_t k = 0; k < config.latent_dim; ++k) vj[k] -= lr * gv[k];
            rejitter_if_degenerate(ui, jitter_rng);
            rejitter_if_degenerate(vj, jitter_rng);
        }

        const double mean_loss = loss_sum / sample_count;
        if (!std::isfinite(mean_loss))
            throw Diverged("train: non-finite loss at epoch " + std::to_string(epoch),
                           epoch);
        for (double c : model.u)
            if (!std::isfinite(c))
                throw Diverged("train: non-finite user factors at epoch " +
                                   std::to_string(epoch), epoch);
        for (double c : model.v)
            if (!std::isfinite(c))
                throw Diverged("train: non-finite item factors at epoch " +
                                   std::to_string(epoch), epoch);

        result.trace.push_back(EpochStats{
            epoch, mean_loss, static_cast<double>(fired) / sample_count});
    }
    return result;
}

}  // namespace

double sample_loss(const FactorModel& model, std::int32_t i, std::int32_t j,
                   double r_norm, const AlphaCoefficients* alpha, double beta,
                   std::int32_t n_items, double log_guard) {
    check_sample_args(model, i, j, r_norm, alpha, beta, n_items, log_guard);
    return eval_sample(model, i, j, r_norm, alpha, beta, n_items, log_guard,
                       nullptr, nullptr)
        .loss;
}

SampleGradient sample_gradient(const FactorModel& model, std::int32_t i,
                               std::int32_t j, double r_norm,
                               const AlphaCoefficients* alpha, double beta,
                               std::int32_t n_items, double log_guard) {
    check_sample_args(model, i, j, r_norm, alpha, beta, n_items, log_guard);
    SampleGradient grad;
    grad.grad_u.resize(static_cast<std::size_t>(model.dim));
    grad.grad_v.resize(static_cast<std::size_t>(model.dim));
    SampleEval eval = eval_sample(model, i, j, r_norm, alpha, beta, n_items,
                                  log_guard, grad.grad_u.data(), grad.grad_v.data());
    grad.loss_value = eval.loss;
    grad.penalty_active = eval.penalty_active;
    return grad;
}

TrainResult train_vanilla(const RatingsDataset& train, const TrainConfig& config) {
    TrainConfig vanilla = config;
    vanilla.zipf_beta = 0.0;
    return train_impl(train, vanilla, nullptr);
}

TrainResult train_zipf(const RatingsDataset& train, const TrainConfig& config,
                       const AlphaCoefficients& alpha) {
    if (static_cast<std::int32_t>(alpha.alpha.size()) != train.num_users)
        throw Error("train_zipf: alpha length must equal the number of users");
    return train_impl(train, config, &alpha);
}

void write_trace_csv(const std::vector<EpochStats>& trace,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_trace_csv: cannot open " + path);
    out << "epoch,train_loss,penalty_fire_fraction\n";
    for (const EpochStats& row : trace)
        out << row.epoch << ',' << detail::format_double(row.train_loss) << ','
            << detail::format_double(row.penalty_fire_fraction) << '\n';
    if (!out) throw Error("write_trace_csv: write failed for " + path);
}

}  // namespace zipfmf
