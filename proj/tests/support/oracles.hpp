#ifndef ZIPFMF_TESTS_ORACLES_HPP
#define ZIPFMF_TESTS_ORACLES_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "zipfmf/model.hpp"
#include "zipfmf/train.hpp"

namespace zipfmf::testsupport {

// Least-squares solve of (A^T A) x = A^T r by Gaussian elimination with
// partial pivoting. A is col-major rows x cols with full column rank.
std::vector<double> normal_equations_solve(const std::vector<double>& a,
                                           std::int32_t rows, std::int32_t cols,
                                           const std::vector<double>& r);

// Dense reference for the top-K occurrence counts: per user sort all item
// scores scale.max * cos(U_i, V_j) descending, ties by lower index.
std::vector<std::int64_t> brute_force_counts(const FactorModel& model,
                                             int top_k);

// Random model with N(0,1) factor entries (rows re-drawn while degenerate).
FactorModel random_model(std::int32_t num_users, std::int32_t num_items,
                         std::int32_t dim, std::mt19937& rng);

// Central finite difference of sample_loss over every coordinate of U_i
// and V_j; returns the largest |analytic - fd| / max(1, |fd|).
double gradient_check(const FactorModel& model, std::int32_t i, std::int32_t j,
                      double r_norm, const AlphaCoefficients* alpha,
                      double beta, std::int32_t n_items, double log_guard,
                      double step);

}  // namespace zipfmf::testsupport

#endif
