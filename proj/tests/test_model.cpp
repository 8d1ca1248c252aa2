#include <doctest.h>

#include <cmath>
#include <fstream>

#include "zipfmf/errors.hpp"
#include "zipfmf/model.hpp"
#include "support/tmpdir.hpp"

using zipfmf::FactorModel;
using zipfmf::testsupport::TempDir;

TEST_CASE("init_model is seeded, bounded and validated") {
    FactorModel a = zipfmf::init_model(4, 6, 3, 42);
    FactorModel b = zipfmf::init_model(4, 6, 3, 42);
    FactorModel c = zipfmf::init_model(4, 6, 3, 43);

    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.u != c.u);
    CHECK(a.u.size() == 12);
    CHECK(a.v.size() == 18);
    for (double x : a.u) {
        CHECK(x > 0.1);
        CHECK(x < 0.9);
    }

    CHECK_THROWS_AS(zipfmf::init_model(0, 1, 1, 0), zipfmf::Error);
    CHECK_THROWS_AS(zipfmf::init_model(1, 1, 0, 0), zipfmf::Error);
}

TEST_CASE("cosine_score and predict_rating follow the clamped cosine rule") {
    FactorModel model;
    model.num_users = 2;
    model.num_items = 2;
    model.dim = 2;
    model.u = {3.0, 4.0, 1.0, 0.0};
    model.v = {4.0, 3.0, 0.0, 1.0};

    CHECK(zipfmf::cosine_score(model, 0, 0) == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(zipfmf::cosine_score(model, 1, 1) == doctest::Approx(0.0));
    CHECK(zipfmf::predict_rating(model, 0, 0) == doctest::Approx(4.8));
    // 5 * cos = 0 clamps up to the scale minimum.
    CHECK(zipfmf::predict_rating(model, 1, 1) == doctest::Approx(0.5));

    model.u[2] = 0.0;  // user 1 row becomes all-zero
    CHECK_THROWS_AS(zipfmf::cosine_score(model, 1, 0),
                    zipfmf::NumericalDegeneracy);
}

TEST_CASE("save_model and load_model round-trip bit-exactly") {
    TempDir dir("model");
    FactorModel model = zipfmf::init_model(5, 7, 4, 99);
    model.scale.min = 1.0;
    model.scale.max = 10.0;

    const std::string path = dir.file("m.bin");
    zipfmf::save_model(model, path);
    FactorModel back = zipfmf::load_model(path);

    CHECK(back.num_users == model.num_users);
    CHECK(back.num_items == model.num_items);
    CHECK(back.dim == model.dim);
    CHECK(back.scale.min == model.scale.min);
    CHECK(back.scale.max == model.scale.max);
    CHECK(back.u == model.u);
    CHECK(back.v == model.v);
}

TEST_CASE("load_model rejects missing, foreign and truncated files") {
    TempDir dir("model");
    CHECK_THROWS_AS(zipfmf::load_model(dir.file("missing.bin")), zipfmf::Error);

    std::ofstream(dir.file("foreign.bin")) << "not a model";
    CHECK_THROWS_AS(zipfmf::load_model(dir.file("foreign.bin")), zipfmf::Error);

    FactorModel model = zipfmf::init_model(3, 3, 2, 1);
    zipfmf::save_model(model, dir.file("full.bin"));
    std::ifstream in(dir.file("full.bin"), std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream(dir.file("cut.bin"), std::ios::binary)
        << bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(zipfmf::load_model(dir.file("cut.bin")), zipfmf::Error);
}
