#ifndef ZIPFMF_MODEL_HPP
#define ZIPFMF_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zipfmf/data.hpp"

namespace zipfmf {

// Row norms below this threshold are treated as degenerate; the trainer
// re-jitters such rows and the scorer refuses them.
inline constexpr double kMinRowNorm = 1e-12;

// User factors U (m x d) and item factors V (n x d), row-major.
struct FactorModel {
    std::int32_t num_users = 0;
    std::int32_t num_items = 0;
    std::int32_t dim = 0;
    RatingScale scale;
    std::vector<double> u;  // num_users * dim
    std::vector<double> v;  // num_items * dim

    std::span<const double> user_row(std::int32_t i) const {
        return {u.data() + static_cast<std::size_t>(i) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> item_row(std::int32_t j) const {
        return {v.data() + static_cast<std::size_t>(j) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> user_row(std::int32_t i) {
        return {u.data() + static_cast<std::size_t>(i) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> item_row(std::int32_t j) {
        return {v.data() + static_cast<std::size_t>(j) * dim,
                static_cast<std::size_t>(dim)};
    }
};

// Seeded init with entries uniform in (0.1, 0.9), so every row norm is
// positive by construction and initial cosines are positive.
FactorModel init_model(std::int32_t num_users, std::int32_t num_items,
                       std::int32_t dim, std::uint32_t seed,
                       RatingScale scale = RatingScale{});

// U_i.V_j / (|U_i| |V_j|). Throws NumericalDegeneracy on norm underflow.
double cosine_score(const FactorModel& model, std::int32_t i, std::int32_t j);

// clamp(R_max * cosine, scale.min, scale.max).
double predict_rating(const FactorModel& model, std::int32_t i, std::int32_t j);

// Flat binary format; load(save(x)) reproduces x bit-exactly.
void save_model(const FactorModel& model, const std::string& path);
FactorModel load_model(const std::string& path);

}  // namespace zipfmf

#endif
