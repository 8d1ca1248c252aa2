#ifndef ZIPFMF_TRAIN_HPP
#define ZIPFMF_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zipfmf/model.hpp"

namespace zipfmf {

struct AlphaCoefficients;  // alpha.hpp

struct TrainConfig {
    double learning_rate = 1e-4;
    double zipf_beta = 0.0;
    int epochs = 50;
    int latent_dim = 50;
    std::uint32_t rng_seed = 42;
    double log_guard = 1e-3;  // skip the penalty when |ln(alpha_i*t0/n)| < this
    bool shuffle_each_epoch = true;
};

struct SampleGradient {
    std::vector<double> grad_u;
    std::vector<double> grad_v;
    double loss_value = 0.0;
    bool penalty_active = false;
};

struct EpochStats {
    int epoch = 0;                       // 1-based
    double train_loss = 0.0;             // mean sample loss at pre-update parameters
    double penalty_fire_fraction = 0.0;  // fraction of samples with an active penalty
};

struct TrainResult {
    FactorModel model;
    std::vector<EpochStats> trace;
};

// Per-sample loss (r_norm - cos(U_i,V_j))^2 - beta*(1 + n/ln(alpha_i*t0/n)).
// The penalty term enters only when beta > 0, alpha_i*t0 > 0 and
// |ln(alpha_i*t0/n)| >= log_guard; otherwise the squared term alone.
double sample_loss(const FactorModel& model, std::int32_t i, std::int32_t j,
                   double r_norm, const AlphaCoefficients* alpha, double beta,
                   std::int32_t n_items, double log_guard = 1e-3);

// Analytic gradient of sample_loss w.r.t. U_i and V_j, both evaluated at
// the current parameters. Matches central finite differences of
// sample_loss to relative error 1e-4.
SampleGradient sample_gradient(const FactorModel& model, std::int32_t i,
                               std::int32_t j, double r_norm,
                               const AlphaCoefficients* alpha, double beta,
                               std::int32_t n_items, double log_guard = 1e-3);

// SGD over shuffled training triples; both factor rows of a sample are
// updated from their pre-update values. Throws Diverged naming the epoch
// when the loss or any factor goes non-finite.
TrainResult train_vanilla(const RatingsDataset& train, const TrainConfig& config);

// Same loop with the Zipf penalty enabled; requires |alpha| == num_users.
// With zipf_beta == 0 the output is bit-identical to train_vanilla.
TrainResult train_zipf(const RatingsDataset& train, const TrainConfig& config,
                       const AlphaCoefficients& alpha);

// CSV with header epoch,train_loss,penalty_fire_fraction.
void write_trace_csv(const std::vector<EpochStats>& trace,
                     const std::string& path);

}  // namespace zipfmf

#endif
