#ifndef ZIPFMF_POWERLAW_HPP
#define ZIPFMF_POWERLAW_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zipfmf/model.hpp"

namespace zipfmf {

struct ZipfExponentInput {
    std::vector<double> values;  // positive popularity values x_i
    double x_max = 0.0;          // reference maximum, >= max(values)
};

// Per-item appearance counts over all users' top-K predicted lists.
struct OccurrenceProfile {
    std::vector<std::int64_t> counts;  // size num_items; sums to m*K
    int top_k = 0;
    std::int32_t coverage = 0;  // items with count > 0
};

// Density k*x_min^k / x^(k+1) above x_min, zero below; the right limit
// k/x_min is returned at x == x_min.
double pareto_pdf(double x, double x_min, double k);

// (1/rank^s) / sum_{n=1..size} (1/n^s), for rank in [1, size].
double zipf_pmf(int rank, double s, int size);

// s = 1 + n * (sum_i ln(x_i / x_max))^-1. Throws DegenerateDistribution
// when the log-sum is zero within 1e-12 (all x_i equal x_max), Error on
// non-positive inputs.
double zipf_exponent_estimate(const ZipfExponentInput& input);

// For every user, score all items and count the K best (ties broken by
// lower item index). Items are ranked by unclamped score. The result is
// independent of the number of threads.
OccurrenceProfile occurrence_profile(const FactorModel& model, int top_k,
                                     int threads = 1);

// Exponent statistic of the positive counts with x_max = max count.
// Zero counts are dropped first.
double matthew_degree_from_counts(const std::vector<std::int64_t>& counts);

// matthew_degree_from_counts applied to occurrence_profile(model, top_k).
// Larger s means a weaker Matthew effect in the output.
double matthew_degree(const FactorModel& model, int top_k);

// CSV with header item_index,count.
void write_occurrence_csv(const OccurrenceProfile& profile,
                          const std::string& path);

}  // namespace zipfmf

#endif
