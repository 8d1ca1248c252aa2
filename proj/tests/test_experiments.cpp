#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "zipfmf/errors.hpp"
#include "zipfmf/experiments.hpp"
#include "support/synthetic.hpp"
#include "support/tmpdir.hpp"

using zipfmf::DataSplit;
using zipfmf::FactorModel;
using zipfmf::Rating;
using zipfmf::RatingsDataset;
using zipfmf::SweepOptions;
using zipfmf::SweepReport;
using zipfmf::SweepRow;

namespace {

DataSplit small_split(std::uint32_t seed) {
    zipfmf::testsupport::SyntheticSpec spec;
    spec.num_users = 24;
    spec.num_items = 36;
    spec.ratings_per_user = 12;
    spec.seed = seed;
    return zipfmf::split(zipfmf::testsupport::make_synthetic(spec), 0.2, 42);
}

SweepOptions small_options() {
    SweepOptions options;
    options.latent_dim = 5;
    options.epochs = 4;
    options.seed = 42;
    options.top_k = 5;
    options.lasso_lambda = 0.1;
    return options;
}

bool rows_equal_ignoring_time(const SweepRow& a, const SweepRow& b) {
    const bool s_equal = (std::isnan(a.matthew_degree_s) &&
                          std::isnan(b.matthew_degree_s)) ||
                         a.matthew_degree_s == b.matthew_degree_s;
    const bool mae_equal =
        (std::isnan(a.mae_test) && std::isnan(b.mae_test)) ||
        a.mae_test == b.mae_test;
    return a.method == b.method && a.learning_rate == b.learning_rate &&
           a.beta == b.beta && a.latent_dim == b.latent_dim &&
           a.epochs == b.epochs && a.seed == b.seed && mae_equal && s_equal &&
           a.coverage == b.coverage && a.status == b.status;
}

bool reports_equal_ignoring_time(const SweepReport& a, const SweepReport& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t k = 0; k < a.rows.size(); ++k)
        if (!rows_equal_ignoring_time(a.rows[k], b.rows[k])) return false;
    return true;
}

}  // namespace

TEST_CASE("evaluate_mae averages absolute errors on the original scale") {
    FactorModel model;
    model.num_users = 1;
    model.num_items = 2;
    model.dim = 2;
    model.u = {1.0, 0.0};
    model.v = {1.0, 0.0, 1.0, std::sqrt(3.0)};
    // Predictions: item 0 -> 5.0, item 1 -> 5*0.5 = 2.5.

    RatingsDataset test;
    test.num_users = 1;
    test.num_items = 2;
    test.user_ids = {1};
    test.item_ids = {1, 2};
    test.ratings = {Rating{0, 0, 4.0}, Rating{0, 1, 3.5}};

    CHECK(zipfmf::evaluate_mae(model, test) == doctest::Approx(1.0));

    RatingsDataset empty = test;
    empty.ratings.clear();
    CHECK_THROWS_AS(zipfmf::evaluate_mae(model, empty), zipfmf::Error);
}

TEST_CASE("precision@K scores each user's ranked test items") {
    FactorModel model;
    model.num_users = 2;
    model.num_items = 3;
    model.dim = 2;
    model.u = {1.0, 0.0, 0.0, 1.0};
    // Scores for user 0: item0 cos=1, item1 cos~0.995, item2 cos=0.
    model.v = {1.0, 0.0, 0.9, 0.09, 0.0, 1.0};

    RatingsDataset test;
    test.num_users = 2;
    test.num_items = 3;
    test.user_ids = {1, 2};
    test.item_ids = {1, 2, 3};

    // User 0 ranks its two test items as (0, 1); only item 0 is relevant.
    test.ratings = {Rating{0, 0, 4.5}, Rating{0, 1, 2.0}};
    CHECK(zipfmf::evaluate_precision_at_k(model, test, 5) ==
          doctest::Approx(0.5));
    CHECK(zipfmf::evaluate_precision_at_k(model, test, 1) ==
          doctest::Approx(1.0));

    // All relevant and none relevant bound the score.
    test.ratings = {Rating{0, 0, 4.0}, Rating{0, 1, 5.0}};
    CHECK(zipfmf::evaluate_precision_at_k(model, test, 2) ==
          doctest::Approx(1.0));
    test.ratings = {Rating{0, 0, 1.0}, Rating{0, 1, 2.0}};
    CHECK(zipfmf::evaluate_precision_at_k(model, test, 2) ==
          doctest::Approx(0.0));

    // Macro average over users with test items: 1.0 and 0.0.
    test.ratings = {Rating{0, 0, 5.0}, Rating{1, 2, 1.0}};
    CHECK(zipfmf::evaluate_precision_at_k(model, test, 2) ==
          doctest::Approx(0.5));

    test.ratings.clear();
    CHECK_THROWS_AS(zipfmf::evaluate_precision_at_k(model, test, 2),
                    zipfmf::Error);
    test.ratings = {Rating{0, 0, 5.0}};
    CHECK_THROWS_AS(zipfmf::evaluate_precision_at_k(model, test, 0),
                    zipfmf::Error);
}

TEST_CASE("run_beta_sweep emits a vanilla reference plus one row per beta") {
    DataSplit data = small_split(71);
    SweepReport report =
        zipfmf::run_beta_sweep(data, {0.0, 1e-3}, 1e-3, small_options());

    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].method == "vanilla");
    CHECK(report.rows[0].beta == 0.0);
    CHECK(report.rows[1].method == "zipf");
    CHECK(report.rows[1].beta == 0.0);
    CHECK(report.rows[2].method == "zipf");
    CHECK(report.rows[2].beta == 1e-3);
    for (const SweepRow& row : report.rows) {
        CHECK(row.status == "ok");
        CHECK(std::isfinite(row.mae_test));
        CHECK(row.coverage > 0);
    }
    // beta=0 under the zipf method is the vanilla trainer bit for bit.
    CHECK(report.rows[1].mae_test == report.rows[0].mae_test);
    CHECK(report.rows[1].coverage == report.rows[0].coverage);
}

TEST_CASE("sweeps are pure and independent of the worker count") {
    DataSplit data = small_split(72);
    SweepOptions options = small_options();

    SweepReport once = zipfmf::run_lr_sweep(data, {1e-3, 3e-3}, 1e-3, options);
    SweepReport twice = zipfmf::run_lr_sweep(data, {1e-3, 3e-3}, 1e-3, options);
    CHECK(reports_equal_ignoring_time(once, twice));
    REQUIRE(once.rows.size() == 4);
    CHECK(once.rows[0].method == "vanilla");
    CHECK(once.rows[1].method == "zipf");
    CHECK(once.rows[1].beta == 1e-3);

    options.jobs = 3;
    SweepReport parallel =
        zipfmf::run_lr_sweep(data, {1e-3, 3e-3}, 1e-3, options);
    CHECK(reports_equal_ignoring_time(once, parallel));
}

TEST_CASE("a report file resumes completed rows and appends new ones") {
    zipfmf::testsupport::TempDir dir("sweep");
    DataSplit data = small_split(73);
    SweepOptions options = small_options();
    options.report_path = dir.file("report.csv");

    SweepReport first = zipfmf::run_beta_sweep(data, {1e-3}, 1e-3, options);
    REQUIRE(first.rows.size() == 2);
    REQUIRE(std::filesystem::exists(options.report_path));

    SweepReport second =
        zipfmf::run_beta_sweep(data, {1e-3, 3e-3}, 1e-3, options);
    REQUIRE(second.rows.size() == 3);
    // Reused rows keep the recorded wall time, proving they were not rerun.
    CHECK(second.rows[0].wall_time_seconds == first.rows[0].wall_time_seconds);
    CHECK(second.rows[1].wall_time_seconds == first.rows[1].wall_time_seconds);
    CHECK(rows_equal_ignoring_time(second.rows[0], first.rows[0]));
    CHECK(rows_equal_ignoring_time(second.rows[1], first.rows[1]));
    CHECK(second.rows[2].beta == 3e-3);

    SweepReport merged = zipfmf::read_report_csv(options.report_path);
    CHECK(merged.rows.size() == 3);
}

TEST_CASE("diverging configurations become rows instead of failures") {
    DataSplit data = small_split(74);
    SweepReport report =
        zipfmf::run_lr_sweep(data, {1e200}, 1e-3, small_options());

    REQUIRE(report.rows.size() == 2);
    for (const SweepRow& row : report.rows) {
        CHECK(row.status == "diverged");
        CHECK(std::isnan(row.mae_test));
        CHECK(std::isnan(row.matthew_degree_s));
        CHECK(row.coverage == 0);
    }
}

TEST_CASE("run_matthew_comparison pairs one reference with the beta grid") {
    DataSplit data = small_split(75);
    SweepOptions options = small_options();
    options.epochs = 2;
    SweepReport report =
        zipfmf::run_matthew_comparison(data, 1e-3, {1e-4, 1e-3}, options);

    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].method == "vanilla");
    CHECK(report.rows[0].beta == 0.0);
    CHECK(report.rows[1].method == "zipf");
    CHECK(report.rows[1].beta == 1e-4);
    CHECK(report.rows[2].beta == 1e-3);
    for (const auto& row : report.rows) CHECK(row.seed == 42);

    CHECK_THROWS_AS(
        zipfmf::run_matthew_comparison(data, 1e-3, {0.0}, options),
        zipfmf::Error);
    CHECK_THROWS_AS(zipfmf::run_matthew_comparison(data, 1e-3, {}, options),
                    zipfmf::Error);
}

TEST_CASE("report CSV round-trips every field including NaN") {
    zipfmf::testsupport::TempDir dir("report");
    SweepReport report;
    SweepRow ok;
    ok.method = "vanilla";
    ok.learning_rate = 3e-4;
    ok.beta = 0.0;
    ok.latent_dim = 50;
    ok.epochs = 50;
    ok.seed = 42;
    ok.mae_test = 0.84375;
    ok.matthew_degree_s = -0.0129;
    ok.coverage = 512;
    ok.wall_time_seconds = 1.25;
    SweepRow bad;
    bad.method = "zipf";
    bad.learning_rate = 1e-2;
    bad.beta = 7e-5;
    bad.latent_dim = 50;
    bad.epochs = 50;
    bad.seed = 7;
    bad.mae_test = std::numeric_limits<double>::quiet_NaN();
    bad.matthew_degree_s = std::numeric_limits<double>::quiet_NaN();
    bad.coverage = 0;
    bad.wall_time_seconds = 0.5;
    bad.status = "diverged";
    report.rows = {ok, bad};

    const std::string path = dir.file("report.csv");
    zipfmf::write_report_csv(report, path);
    SweepReport back = zipfmf::read_report_csv(path);

    REQUIRE(back.rows.size() == 2);
    CHECK(rows_equal_ignoring_time(back.rows[0], report.rows[0]));
    CHECK(rows_equal_ignoring_time(back.rows[1], report.rows[1]));
    CHECK(back.rows[0].wall_time_seconds == 1.25);
    CHECK(back.rows[1].wall_time_seconds == 0.5);

    CHECK_THROWS_AS(zipfmf::read_report_csv(dir.file("missing.csv")),
                    zipfmf::Error);
}

TEST_CASE("sweep argument validation") {
    DataSplit data = small_split(76);
    SweepOptions options = small_options();
    CHECK_THROWS_AS(zipfmf::run_lr_sweep(data, {}, 1e-3, options), zipfmf::Error);
    CHECK_THROWS_AS(zipfmf::run_lr_sweep(data, {1e-3}, 0.0, options),
                    zipfmf::Error);
    CHECK_THROWS_AS(zipfmf::run_beta_sweep(data, {}, 1e-3, options),
                    zipfmf::Error);
    CHECK_THROWS_AS(zipfmf::run_beta_sweep(data, {1e-3}, -1.0, options),
                    zipfmf::Error);
    options.jobs = 0;
    CHECK_THROWS_AS(zipfmf::run_beta_sweep(data, {1e-3}, 1e-3, options),
                    zipfmf::Error);
}

TEST_CASE("default grids cover the documented ranges") {
    const auto lrs = zipfmf::default_lr_grid();
    CHECK(lrs.size() == 7);
    CHECK(lrs.front() == 1e-5);
    CHECK(lrs.back() == 1e-2);

    const auto betas = zipfmf::default_beta_grid();
    CHECK(betas.front() == 0.0);
    CHECK(std::count(betas.begin(), betas.end(), 7e-5) == 1);
    CHECK(std::count(betas.begin(), betas.end(), 1e-3) == 1);
    for (std::size_t k = 1; k < betas.size(); ++k)
        CHECK(betas[k] > betas[k - 1]);
}
