#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace zipfmf::testsupport {

namespace {

double clamp_half_star(double raw, const RatingScale& scale) {
    const double clamped = std::clamp(raw, scale.min, scale.max);
    return std::round(clamped * 2.0) / 2.0;
}

}  // namespace

RatingsDataset make_synthetic(const SyntheticSpec& spec) {
    if (spec.num_users < 1 || spec.num_items < 1 || spec.planted_dim < 1)
        throw std::invalid_argument("make_synthetic: bad dimensions");
    if (spec.ratings_per_user < 1 || spec.ratings_per_user > spec.num_items)
        throw std::invalid_argument("make_synthetic: bad ratings_per_user");

    std::mt19937 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(
        std::numeric_limits<double>::min(), 1.0);

    const std::size_t d = static_cast<std::size_t>(spec.planted_dim);
    std::vector<double> p(static_cast<std::size_t>(spec.num_users) * d);
    std::vector<double> q(static_cast<std::size_t>(spec.num_items) * d);
    for (double& c : p) c = gauss(rng);
    for (double& c : q) c = gauss(rng);

    std::vector<double> p_norm(static_cast<std::size_t>(spec.num_users));
    std::vector<double> q_norm(static_cast<std::size_t>(spec.num_items));
    for (std::int32_t i = 0; i < spec.num_users; ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) sq += p[i * d + k] * p[i * d + k];
        p_norm[i] = std::sqrt(sq);
    }
    for (std::int32_t j = 0; j < spec.num_items; ++j) {
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) sq += q[j * d + k] * q[j * d + k];
        q_norm[j] = std::sqrt(sq);
    }

    std::vector<double> weight(static_cast<std::size_t>(spec.num_items));
    for (std::int32_t j = 0; j < spec.num_items; ++j)
        weight[j] = 1.0 / std::pow(static_cast<double>(j + 1),
                                   spec.popularity_skew);

    RatingsDataset ds;
    ds.num_users = spec.num_users;
    ds.num_items = spec.num_items;
    ds.ratings.reserve(static_cast<std::size_t>(spec.num_users) *
                       spec.ratings_per_user);
    for (std::int32_t i = 0; i < spec.num_users; ++i) {
        ds.user_ids.push_back(i + 1);
        ds.user_index.emplace(i + 1, i);
    }
    for (std::int32_t j = 0; j < spec.num_items; ++j) {
        ds.item_ids.push_back(j + 1);
        ds.item_index.emplace(j + 1, j);
    }

    // Weighted sampling without replacement via exponential race keys:
    // the ratings_per_user smallest Exp(1)/w_j win.
    std::vector<std::int32_t> order(static_cast<std::size_t>(spec.num_items));
    std::vector<double> keys(static_cast<std::size_t>(spec.num_items));
    for (std::int32_t i = 0; i < spec.num_users; ++i) {
        for (std::int32_t j = 0; j < spec.num_items; ++j)
            keys[j] = -std::log(unit(rng)) / weight[j];
        std::iota(order.begin(), order.end(), 0);
        std::nth_element(order.begin(), order.begin() + spec.ratings_per_user - 1,
                         order.end(), [&](std::int32_t a, std::int32_t b) {
                             return keys[a] < keys[b];
                         });
        std::sort(order.begin(), order.begin() + spec.ratings_per_user);

        for (int pick = 0; pick < spec.ratings_per_user; ++pick) {
            const std::int32_t j = order[pick];
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += p[i * d + k] * q[j * d + k];
            const double cos = dot / (p_norm[i] * q_norm[j]);
            const double raw = spec.signal_center + spec.signal_spread * cos +
                               spec.noise_sigma * gauss(rng);
            ds.ratings.push_back(Rating{i, j, clamp_half_star(raw, ds.scale)});
        }
    }
    return ds;
}

void write_movielens_csv(const RatingsDataset& dataset, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::ofstream movies(fs::path(dir) / "movies.csv");
    if (!movies) throw std::runtime_error("cannot write movies.csv under " + dir);
    movies << "movieId,title,genres\n";
    for (std::size_t j = 0; j < dataset.item_ids.size(); ++j)
        movies << dataset.item_ids[j] << ",Item " << dataset.item_ids[j]
               << ",(no genres listed)\n";

    std::ofstream ratings(fs::path(dir) / "ratings.csv");
    if (!ratings) throw std::runtime_error("cannot write ratings.csv under " + dir);
    ratings << "userId,movieId,rating,timestamp\n";
    char value[32];
    for (const Rating& r : dataset.ratings) {
        std::snprintf(value, sizeof(value), "%.1f", r.value);
        ratings << dataset.user_ids[r.user] << ',' << dataset.item_ids[r.item]
                << ',' << value << ",0\n";
    }
}

}  // namespace zipfmf::testsupport
