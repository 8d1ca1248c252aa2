#ifndef ZIPFMF_ALPHA_HPP
#define ZIPFMF_ALPHA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zipfmf/model.hpp"
#include "zipfmf/train.hpp"

namespace zipfmf {

// Per-user weights such that item j's output rank is approximated by
// sum_i alpha_i * (U_i . V_j), fitted against stage-1 ranks.
struct AlphaCoefficients {
    std::vector<double> alpha;  // length num_users
    double lasso_lambda = 0.0;
    std::uint64_t source_model_hash = 0;
};

// targets[j] = popularity rank of item j (1 = most popular) from the
// stage-1 occurrence profile. Ties rank the lower item index better;
// zero-count items come last, ordered by index.
struct RankTargets {
    std::vector<double> targets;  // permutation of 1..n
    static constexpr const char* tie_rule = "count_desc_then_item_index";
};

// Dense column-major design matrix, one column per user.
struct DesignMatrix {
    std::int32_t rows = 0;  // items
    std::int32_t cols = 0;  // users
    std::vector<double> values;

    double at(std::int32_t r, std::int32_t c) const {
        return values[static_cast<std::size_t>(c) * rows + r];
    }
    double& at(std::int32_t r, std::int32_t c) {
        return values[static_cast<std::size_t>(c) * rows + r];
    }
};

struct LassoResult {
    std::vector<double> coefficients;
    bool converged = false;
    int sweeps = 0;
    double max_kkt_violation = 0.0;
    std::vector<double> objective_history;  // objective after each sweep
};

RankTargets rank_targets(const FactorModel& stage1_model, int top_k);

// A[j][i] = U_i . V_j (raw dot products).
DesignMatrix build_design(const FactorModel& model);

// Minimizes sum_j (r_j - sum_i alpha_i A[j][i])^2 + lambda * |alpha|_1 by
// cyclic coordinate descent with exact soft-threshold updates. All-zero
// columns get coefficient 0 directly. Stops when the largest coordinate
// change in a sweep is below tol.
LassoResult solve_lasso(const DesignMatrix& design,
                        const std::vector<double>& targets, double lambda,
                        double tol = 1e-8, int max_iter = 1000);

// sum_j (r_j - (A alpha)_j)^2 + lambda * |alpha|_1.
double lasso_objective(const DesignMatrix& design,
                       const std::vector<double>& targets,
                       const std::vector<double>& coefficients, double lambda);

// Largest violation of the subgradient optimality conditions:
// |2 A_i^T (A alpha - r) + lambda sign(alpha_i)| for alpha_i != 0 and
// max(0, |2 A_i^T (A alpha - r)| - lambda) for alpha_i == 0.
double lasso_kkt_violation(const DesignMatrix& design,
                           const std::vector<double>& targets,
                           const std::vector<double>& coefficients,
                           double lambda);

// Stage-1 pipeline: train_vanilla -> rank_targets -> build_design ->
// solve_lasso. Deterministic for fixed seeds.
AlphaCoefficients estimate_alpha(const RatingsDataset& train,
                                 const TrainConfig& stage1_config, int top_k,
                                 double lambda, double tol = 1e-8,
                                 int max_iter = 1000);

// FNV-1a over the model dimensions and factor bytes.
std::uint64_t model_hash(const FactorModel& model);

// CSV with header user_index,alpha.
void write_alpha_csv(const AlphaCoefficients& alpha, const std::string& path);
AlphaCoefficients read_alpha_csv(const std::string& path);

}  // namespace zipfmf

#endif
