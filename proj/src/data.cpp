#include "zipfmf/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>

#include "text_util.hpp"

namespace zipfmf {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& why) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + why);
}

std::int64_t parse_id(const std::string& field, const std::string& path,
                      std::size_t line_no, const char* what) {
    char* end = nullptr;
    errno = 0;
    long long value = std::strtoll(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno != 0)
        parse_fail(path, line_no, std::string("bad ") + what + " '" + field + "'");
    return value;
}

double parse_real(const std::string& field, const std::string& path,
                  std::size_t line_no, const char* what) {
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || errno != 0 ||
        !std::isfinite(value))
        parse_fail(path, line_no, std::string("bad ") + what + " '" + field + "'");
    return value;
}

}  // namespace

RatingsDataset load_movielens(const std::string& ratings_path,
                              const std::string& movies_path) {
    RatingsDataset ds;
    ds.scale = RatingScale{0.5, 5.0};

    if (!movies_path.empty()) {
        std::ifstream movies(movies_path);
        if (!movies) throw ParseError("cannot open " + movies_path);
        std::string line;
        std::size_t line_no = 0;
        bool saw_row = false;
        while (std::getline(movies, line)) {
            ++line_no;
            if (line_no == 1) {
                if (line.rfind("movieId,", 0) != 0)
                    parse_fail(movies_path, 1, "expected header movieId,title,genres");
                continue;
            }
            if (line.empty()) continue;
            auto fields = detail::split_csv_line(line);
            if (fields.size() < 3)
                parse_fail(movies_path, line_no, "expected 3 columns");
            std::int64_t movie_id = parse_id(fields[0], movies_path, line_no, "movieId");
            if (ds.item_index.count(movie_id))
                parse_fail(movies_path, line_no, "duplicate movieId");
            ds.item_index.emplace(movie_id, static_cast<std::int32_t>(ds.item_ids.size()));
            ds.item_ids.push_back(movie_id);
            saw_row = true;
        }
        if (!saw_row) throw ParseError(movies_path + ": no movies");
    }
    const bool catalog_fixed = !movies_path.empty();

    std::ifstream ratings(ratings_path);
    if (!ratings) throw ParseError("cannot open " + ratings_path);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ratings, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind("userId,", 0) != 0)
                parse_fail(ratings_path, 1,
                           "expected header userId,movieId,rating,timestamp");
            continue;
        }
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 4)
            parse_fail(ratings_path, line_no, "expected 4 columns");

        std::int64_t user_id = parse_id(fields[0], ratings_path, line_no, "userId");
        std::int64_t movie_id = parse_id(fields[1], ratings_path, line_no, "movieId");
        double rating = parse_real(fields[2], ratings_path, line_no, "rating");
        parse_id(fields[3], ratings_path, line_no, "timestamp");  // discarded

        if (rating < ds.scale.min || rating > ds.scale.max)
            parse_fail(ratings_path, line_no,
                       "rating " + fields[2] + " outside [" +
                           detail::format_double(ds.scale.min) + ", " +
                           detail::format_double(ds.scale.max) + "]");

        auto [uit, user_new] = ds.user_index.emplace(
            user_id, static_cast<std::int32_t>(ds.user_ids.size()));
        if (user_new) ds.user_ids.push_back(user_id);

        std::int32_t item;
        auto iit = ds.item_index.find(movie_id);
        if (iit != ds.item_index.end()) {
            item = iit->second;
        } else if (catalog_fixed) {
            parse_fail(ratings_path, line_no,
                       "movieId " + fields[1] + " not in " + movies_path);
        } else {
            item = static_cast<std::int32_t>(ds.item_ids.size());
            ds.item_index.emplace(movie_id, item);
            ds.item_ids.push_back(movie_id);
        }

        ds.ratings.push_back(Rating{uit->second, item, rating});
    }
    if (ds.ratings.empty()) throw ParseError(ratings_path + ": no ratings");

    // Exact duplicate (user,item) pairs keep the last value seen.
    {
        std::unordered_map<std::int64_t, std::int32_t> seen;
        seen.reserve(ds.ratings.size());
        std::vector<Rating> dedup;
        dedup.reserve(ds.ratings.size());
        for (const Rating& r : ds.ratings) {
            std::int64_t key =
                (static_cast<std::int64_t>(r.user) << 32) | static_cast<std::uint32_t>(r.item);
            auto [it, inserted] = seen.emplace(key, static_cast<std::int32_t>(dedup.size()));
            if (inserted)
                dedup.push_back(r);
            else
                dedup[it->second].value = r.value;
        }
        ds.ratings = std::move(dedup);
    }

    ds.num_users = static_cast<std::int32_t>(ds.user_ids.size());
    ds.num_items = static_cast<std::int32_t>(ds.item_ids.size());
    return ds;
}

DataSplit split(const RatingsDataset& dataset, double test_fraction, int seed) {
    if (dataset.ratings.empty()) throw Error("split: empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error("split: test_fraction must lie in (0,1)");

    const std::size_t total = dataset.ratings.size();
    const std::size_t test_size = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(total)));
    if (test_size == 0 || test_size == total)
        throw Error("split: fraction " + detail::format_double(test_fraction) +
                    " leaves an empty train or test side");

    // Canonical (user,item) order before the shuffle makes membership a
    // function of the rating multiset rather than of file order.
    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const Rating& ra = dataset.ratings[a];
        const Rating& rb = dataset.ratings[b];
        if (ra.user != rb.user) return ra.user < rb.user;
        if (ra.item != rb.item) return ra.item < rb.item;
        return ra.value < rb.value;
    });
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::shuffle(order.begin(), order.end(), rng);

    DataSplit out;
    out.seed = seed;
    out.test_fraction = test_fraction;
    out.train = dataset;
    out.test = dataset;
    out.train.ratings.clear();
    out.test.ratings.clear();
    out.train.ratings.reserve(total - test_size);
    out.test.ratings.reserve(test_size);

    std::vector<bool> in_test(total, false);
    for (std::size_t k = 0; k < test_size; ++k) in_test[order[k]] = true;
    for (std::size_t idx = 0; idx < total; ++idx) {
        (in_test[idx] ? out.test : out.train).ratings.push_back(dataset.ratings[idx]);
    }
    return out;
}

}  // namespace zipfmf
