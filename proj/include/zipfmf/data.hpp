#ifndef ZIPFMF_DATA_HPP
#define ZIPFMF_DATA_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "zipfmf/errors.hpp"

namespace zipfmf {

// Rating bounds of the source data. MovieLens uses half-star ratings in
// [0.5, 5.0]; max doubles as the R_max normalizer for training.
struct RatingScale {
    double min = 0.5;
    double max = 5.0;
};

struct Rating {
    std::int32_t user = 0;  // contiguous index in [0, num_users)
    std::int32_t item = 0;  // contiguous index in [0, num_items)
    double value = 0.0;     // on the original rating scale
};

// Sparse user-item-rating triplets with bijective external-id maps.
// num_items covers the full catalog when a movies file is supplied, so
// items without ratings still occupy an index.
struct RatingsDataset {
    std::vector<Rating> ratings;
    std::int32_t num_users = 0;
    std::int32_t num_items = 0;
    std::unordered_map<std::int64_t, std::int32_t> user_index;  // external id -> index
    std::unordered_map<std::int64_t, std::int32_t> item_index;
    std::vector<std::int64_t> user_ids;  // index -> external id
    std::vector<std::int64_t> item_ids;
    RatingScale scale;
};

struct DataSplit {
    RatingsDataset train;
    RatingsDataset test;
    int seed = 0;
    double test_fraction = 0.0;
};

// Loads MovieLens-format CSVs: ratings.csv with header
// userId,movieId,rating,timestamp and optionally movies.csv with header
// movieId,title,genres. When movies_path is empty the item universe is
// the set of rated movies. Throws ParseError naming the offending line.
RatingsDataset load_movielens(const std::string& ratings_path,
                              const std::string& movies_path = "");

// Seeded global holdout: |test| = round(test_fraction * |ratings|).
// Membership depends only on (rating multiset, seed, fraction), not on
// input order. Throws Error when either side of the split is empty.
DataSplit split(const RatingsDataset& dataset, double test_fraction, int seed);

}  // namespace zipfmf

#endif
