#ifndef ZIPFMF_EXPERIMENTS_HPP
#define ZIPFMF_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zipfmf/alpha.hpp"
#include "zipfmf/data.hpp"
#include "zipfmf/model.hpp"
#include "zipfmf/train.hpp"

namespace zipfmf {

// One completed (or failed) training run of a sweep.
struct SweepRow {
    std::string method;  // "vanilla" or "zipf"
    double learning_rate = 0.0;
    double beta = 0.0;
    int latent_dim = 0;
    int epochs = 0;
    std::uint32_t seed = 0;
    double mae_test = 0.0;
    double matthew_degree_s = 0.0;  // NaN when unavailable
    std::int32_t coverage = 0;
    double wall_time_seconds = 0.0;
    std::string status = "ok";  // ok | diverged | degenerate
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

struct SweepOptions {
    int latent_dim = 50;
    int epochs = 50;
    std::uint32_t seed = 42;
    int top_k = 10;
    double lasso_lambda = 0.1;
    double log_guard = 1e-3;
    bool alpha_per_run = false;  // recompute stage-1 alpha per configuration
    int jobs = 1;
    std::string report_path;  // when set, existing rows are reused and the
                              // file is rewritten with the merged report
};

// Mean |R_ij - predict_rating(i,j)| over the test triples, original scale.
double evaluate_mae(const FactorModel& model, const RatingsDataset& test);

// Per user with test items: rank that user's test items by predicted
// score, take the top min(K, |test items|), count the fraction rated
// >= 4.0. Macro-averaged; users without test items are skipped.
double evaluate_precision_at_k(const FactorModel& model,
                               const RatingsDataset& test, int top_k);

// For each learning rate: one vanilla run and one zipf run at beta_fixed,
// sharing a stage-1 alpha unless alpha_per_run. Diverged runs become rows
// with status "diverged" instead of aborting the sweep.
SweepReport run_lr_sweep(const DataSplit& data,
                         const std::vector<double>& lr_grid, double beta_fixed,
                         const SweepOptions& options);

// One vanilla reference run at lr_fixed plus one zipf run per beta.
SweepReport run_beta_sweep(const DataSplit& data,
                           const std::vector<double>& beta_grid,
                           double lr_fixed, const SweepOptions& options);

// Degree-of-Matthew-effect comparison: one vanilla reference run at
// lr_fixed plus one zipf run per beta (betas must be positive), every run
// at options.seed, each measured by matthew_degree.
SweepReport run_matthew_comparison(const DataSplit& data, double lr_fixed,
                                   const std::vector<double>& beta_grid,
                                   const SweepOptions& options);

std::vector<double> default_lr_grid();
std::vector<double> default_beta_grid();

// CSV columns: method,learning_rate,beta,latent_dim,epochs,seed,mae_test,
// matthew_degree_s,coverage,wall_time_seconds,status (header included).
void write_report_csv(const SweepReport& report, const std::string& path);
SweepReport read_report_csv(const std::string& path);

}  // namespace zipfmf

#endif
