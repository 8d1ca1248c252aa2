#include "zipfmf/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "zipfmf/errors.hpp"

namespace zipfmf {

namespace {

constexpr char kMagic[4] = {'Z', 'M', 'F', '1'};

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

}  // namespace

FactorModel init_model(std::int32_t num_users, std::int32_t num_items,
                       std::int32_t dim, std::uint32_t seed, RatingScale scale) {
    if (num_users < 1 || num_items < 1 || dim < 1)
        throw Error("init_model: dimensions must be >= 1");
    FactorModel model;
    model.num_users = num_users;
    model.num_items = num_items;
    model.dim = dim;
    model.scale = scale;
    model.u.resize(static_cast<std::size_t>(num_users) * dim);
    model.v.resize(static_cast<std::size_t>(num_items) * dim);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> entry(0.1, 0.9);
    for (double& x : model.u) x = entry(rng);
    for (double& x : model.v) x = entry(rng);
    return model;
}

double cosine_score(const FactorModel& model, std::int32_t i, std::int32_t j) {
    auto ui = model.user_row(i);
    auto vj = model.item_row(j);
    double nu = std::sqrt(dot(ui, ui));
    double nv = std::sqrt(dot(vj, vj));
    if (nu < kMinRowNorm || nv < kMinRowNorm)
        throw NumericalDegeneracy("cosine_score: factor row norm underflow");
    return dot(ui, vj) / (nu * nv);
}

double predict_rating(const FactorModel& model, std::int32_t i, std::int32_t j) {
    double raw = model.scale.max * cosine_score(model, i, j);
    return std::clamp(raw, model.scale.min, model.scale.max);
}

void save_model(const FactorModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_model: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    auto put_i32 = [&](std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    put_i32(model.num_users);
    put_i32(model.num_items);
    put_i32(model.dim);
    put_f64(model.scale.min);
    put_f64(model.scale.max);
    out.write(reinterpret_cast<const char*>(model.u.data()),
              static_cast<std::streamsize>(model.u.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(model.v.data()),
              static_cast<std::streamsize>(model.v.size() * sizeof(double)));
    if (!out) throw Error("save_model: write failed for " + path);
}

FactorModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_model: cannot open " + path);
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("load_model: " + path + " is not a model file");
    FactorModel model;
    auto get_i32 = [&](std::int32_t& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    auto get_f64 = [&](double& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    get_i32(model.num_users);
    get_i32(model.num_items);
    get_i32(model.dim);
    get_f64(model.scale.min);
    get_f64(model.scale.max);
    if (!in || model.num_users < 1 || model.num_items < 1 || model.dim < 1)
        throw Error("load_model: corrupt header in " + path);
    model.u.resize(static_cast<std::size_t>(model.num_users) * model.dim);
    model.v.resize(static_cast<std::size_t>(model.num_items) * model.dim);
    in.read(reinterpret_cast<char*>(model.u.data()),
            static_cast<std::streamsize>(model.u.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(model.v.data()),
            static_cast<std::streamsize>(model.v.size() * sizeof(double)));
    if (!in) throw Error("load_model: truncated file " + path);
    return model;
}

}  // namespace zipfmf
