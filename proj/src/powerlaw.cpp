#include "zipfmf/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "zipfmf/errors.hpp"
#include "text_util.hpp"

namespace zipfmf {

double pareto_pdf(double x, double x_min, double k) {
    if (!(x_min > 0.0)) throw Error("pareto_pdf: x_min must be positive");
    if (!(k > 0.0)) throw Error("pareto_pdf: k must be positive");
    if (x < x_min) return 0.0;
    if (x == x_min) return k / x_min;  // right limit
    return k * std::pow(x_min, k) / std::pow(x, k + 1.0);
}

double zipf_pmf(int rank, double s, int size) {
    if (size < 1) throw Error("zipf_pmf: size must be >= 1");
    if (rank < 1 || rank > size)
        throw Error("zipf_pmf: rank " + std::to_string(rank) + " outside [1, " +
                    std::to_string(size) + "]");
    double denom = 0.0;
    for (int n = 1; n <= size; ++n) denom += std::pow(static_cast<double>(n), -s);
    return std::pow(static_cast<double>(rank), -s) / denom;
}

double zipf_exponent_estimate(const ZipfExponentInput& input) {
    const auto& x = input.values;
    if (x.empty()) throw Error("zipf_exponent_estimate: empty input");
    if (!(input.x_max > 0.0))
        throw Error("zipf_exponent_estimate: x_max must be positive");
    double log_sum = 0.0;
    for (double xi : x) {
        if (!(xi > 0.0))
            throw Error("zipf_exponent_estimate: values must be positive");
        if (xi > input.x_max)
            throw Error("zipf_exponent_estimate: value exceeds x_max");
        log_sum += std::log(xi / input.x_max);
    }
    if (std::fabs(log_sum) < 1e-12)
        throw DegenerateDistribution(
            "zipf_exponent_estimate: all values equal x_max");
    return 1.0 + static_cast<double>(x.size()) / log_sum;
}

namespace {

// Appearance counts for users [first, last); scores are R_max * cosine
// without clamping, ties favor the lower item index.
void count_top_k(const FactorModel& model, int top_k,
                 const std::vector<double>& item_norms, std::int32_t first,
                 std::int32_t last, std::vector<std::int64_t>& counts) {
    const std::int32_t n = model.num_items;
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
    for (std::int32_t i = first; i < last; ++i) {
        auto ui = model.user_row(i);
        double nu = 0.0;
        for (double c : ui) nu += c * c;
        nu = std::sqrt(nu);
        if (nu < kMinRowNorm)
            throw NumericalDegeneracy("occurrence_profile: user row norm underflow");
        for (std::int32_t j = 0; j < n; ++j) {
            auto vj = model.item_row(j);
            double t0 = 0.0;
            for (std::int32_t k = 0; k < model.dim; ++k) t0 += ui[k] * vj[k];
            // Same rounding as scale.max * cosine_score so rankings agree
            // bit for bit with the prediction path.
            scores[j] = model.scale.max * (t0 / (nu * item_norms[j]));
        }
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + top_k, idx.end(),
                          [&](std::int32_t a, std::int32_t b) {
                              if (scores[a] != scores[b]) return scores[a] > scores[b];
                              return a < b;
                          });
        for (int k = 0; k < top_k; ++k) ++counts[idx[k]];
    }
}

}  // namespace

OccurrenceProfile occurrence_profile(const FactorModel& model, int top_k,
                                     int threads) {
    if (top_k < 1) throw Error("occurrence_profile: top_k must be >= 1");
    if (top_k > model.num_items)
        throw Error("occurrence_profile: top_k exceeds the number of items");

    std::vector<double> item_norms(static_cast<std::size_t>(model.num_items));
    for (std::int32_t j = 0; j < model.num_items; ++j) {
        auto vj = model.item_row(j);
        double nv = 0.0;
        for (double c : vj) nv += c * c;
        item_norms[j] = std::sqrt(nv);
        if (item_norms[j] < kMinRowNorm)
            throw NumericalDegeneracy("occurrence_profile: item row norm underflow");
    }

    OccurrenceProfile profile;
    profile.top_k = top_k;
    profile.counts.assign(static_cast<std::size_t>(model.num_items), 0);

    threads = std::clamp(threads, 1, static_cast<int>(model.num_users));
    if (threads == 1) {
        count_top_k(model, top_k, item_norms, 0, model.num_users, profile.counts);
    } else {
        std::vector<std::vector<std::int64_t>> partial(
            static_cast<std::size_t>(threads),
            std::vector<std::int64_t>(static_cast<std::size_t>(model.num_items), 0));
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        const std::int32_t chunk = (model.num_users + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::int32_t first = t * chunk;
            std::int32_t last = std::min(model.num_users, first + chunk);
            pool.emplace_back([&, t, first, last] {
                try {
                    count_top_k(model, top_k, item_norms, first, last, partial[t]);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
        for (const auto& local : partial)
            for (std::int32_t j = 0; j < model.num_items; ++j)
                profile.counts[j] += local[j];
    }

    profile.coverage = static_cast<std::int32_t>(
        std::count_if(profile.counts.begin(), profile.counts.end(),
                      [](std::int64_t c) { return c > 0; }));
    return profile;
}

double matthew_degree_from_counts(const std::vector<std::int64_t>& counts) {
    ZipfExponentInput input;
    std::int64_t max_count = 0;
    for (std::int64_t c : counts) {
        if (c > 0) {
            input.values.push_back(static_cast<double>(c));
            max_count = std::max(max_count, c);
        }
    }
    if (input.values.empty())
        throw Error("matthew_degree: no positive counts");
    input.x_max = static_cast<double>(max_count);
    return zipf_exponent_estimate(input);
}

double matthew_degree(const FactorModel& model, int top_k) {
    return matthew_degree_from_counts(occurrence_profile(model, top_k).counts);
}

void write_occurrence_csv(const OccurrenceProfile& profile,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_occurrence_csv: cannot open " + path);
    out << "item_index,count\n";
    for (std::size_t j = 0; j < profile.counts.size(); ++j)
        out << j << ',' << profile.counts[j] << '\n';
    if (!out) throw Error("write_occurrence_csv: write failed for " + path);
}

}  // namespace zipfmf
