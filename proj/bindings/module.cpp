#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zipfmf/alpha.hpp"
#include "zipfmf/data.hpp"
#include "zipfmf/errors.hpp"
#include "zipfmf/experiments.hpp"
#include "zipfmf/model.hpp"
#include "zipfmf/powerlaw.hpp"
#include "zipfmf/train.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Matrix factorization with a Zipf popularity penalty";

    py::register_exception<zipfmf::Error>(m, "Error", PyExc_RuntimeError);

    py::class_<zipfmf::RatingScale>(m, "RatingScale")
        .def(py::init<>())
        .def_readwrite("min", &zipfmf::RatingScale::min)
        .def_readwrite("max", &zipfmf::RatingScale::max);

    py::class_<zipfmf::Rating>(m, "Rating")
        .def_readonly("user", &zipfmf::Rating::user)
        .def_readonly("item", &zipfmf::Rating::item)
        .def_readonly("value", &zipfmf::Rating::value);

    py::class_<zipfmf::RatingsDataset>(m, "RatingsDataset")
        .def_readonly("ratings", &zipfmf::RatingsDataset::ratings)
        .def_readonly("num_users", &zipfmf::RatingsDataset::num_users)
        .def_readonly("num_items", &zipfmf::RatingsDataset::num_items)
        .def_readonly("user_ids", &zipfmf::RatingsDataset::user_ids)
        .def_readonly("item_ids", &zipfmf::RatingsDataset::item_ids)
        .def_readonly("scale", &zipfmf::RatingsDataset::scale)
        .def("__len__",
             [](const zipfmf::RatingsDataset& ds) { return ds.ratings.size(); });

    py::class_<zipfmf::DataSplit>(m, "DataSplit")
        .def_readonly("train", &zipfmf::DataSplit::train)
        .def_readonly("test", &zipfmf::DataSplit::test)
        .def_readonly("seed", &zipfmf::DataSplit::seed)
        .def_readonly("test_fraction", &zipfmf::DataSplit::test_fraction);

    py::class_<zipfmf::FactorModel>(m, "FactorModel")
        .def_readonly("num_users", &zipfmf::FactorModel::num_users)
        .def_readonly("num_items", &zipfmf::FactorModel::num_items)
        .def_readonly("dim", &zipfmf::FactorModel::dim)
        .def_readonly("scale", &zipfmf::FactorModel::scale)
        .def_property_readonly(
            "user_factors",
            [](const zipfmf::FactorModel& model) { return model.u; })
        .def_property_readonly(
            "item_factors",
            [](const zipfmf::FactorModel& model) { return model.v; });

    py::class_<zipfmf::TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &zipfmf::TrainConfig::learning_rate)
        .def_readwrite("zipf_beta", &zipfmf::TrainConfig::zipf_beta)
        .def_readwrite("epochs", &zipfmf::TrainConfig::epochs)
        .def_readwrite("latent_dim", &zipfmf::TrainConfig::latent_dim)
        .def_readwrite("rng_seed", &zipfmf::TrainConfig::rng_seed)
        .def_readwrite("log_guard", &zipfmf::TrainConfig::log_guard)
        .def_readwrite("shuffle_each_epoch",
                       &zipfmf::TrainConfig::shuffle_each_epoch);

    py::class_<zipfmf::EpochStats>(m, "EpochStats")
        .def_readonly("epoch", &zipfmf::EpochStats::epoch)
        .def_readonly("train_loss", &zipfmf::EpochStats::train_loss)
        .def_readonly("penalty_fire_fraction",
                      &zipfmf::EpochStats::penalty_fire_fraction);

    py::class_<zipfmf::TrainResult>(m, "TrainResult")
        .def_readonly("model", &zipfmf::TrainResult::model)
        .def_readonly("trace", &zipfmf::TrainResult::trace);

    py::class_<zipfmf::AlphaCoefficients>(m, "AlphaCoefficients")
        .def(py::init<>())
        .def_readwrite("alpha", &zipfmf::AlphaCoefficients::alpha)
        .def_readwrite("lasso_lambda", &zipfmf::AlphaCoefficients::lasso_lambda)
        .def_readwrite("source_model_hash",
                       &zipfmf::AlphaCoefficients::source_model_hash);

    py::class_<zipfmf::OccurrenceProfile>(m, "OccurrenceProfile")
        .def_readonly("counts", &zipfmf::OccurrenceProfile::counts)
        .def_readonly("top_k", &zipfmf::OccurrenceProfile::top_k)
        .def_readonly("coverage", &zipfmf::OccurrenceProfile::coverage);

    py::class_<zipfmf::SweepRow>(m, "SweepRow")
        .def_readonly("method", &zipfmf::SweepRow::method)
        .def_readonly("learning_rate", &zipfmf::SweepRow::learning_rate)
        .def_readonly("beta", &zipfmf::SweepRow::beta)
        .def_readonly("latent_dim", &zipfmf::SweepRow::latent_dim)
        .def_readonly("epochs", &zipfmf::SweepRow::epochs)
        .def_readonly("seed", &zipfmf::SweepRow::seed)
        .def_readonly("mae_test", &zipfmf::SweepRow::mae_test)
        .def_readonly("matthew_degree_s", &zipfmf::SweepRow::matthew_degree_s)
        .def_readonly("coverage", &zipfmf::SweepRow::coverage)
        .def_readonly("wall_time_seconds", &zipfmf::SweepRow::wall_time_seconds)
        .def_readonly("status", &zipfmf::SweepRow::status);

    py::class_<zipfmf::SweepReport>(m, "SweepReport")
        .def_readonly("rows", &zipfmf::SweepReport::rows);

    py::class_<zipfmf::SweepOptions>(m, "SweepOptions")
        .def(py::init<>())
        .def_readwrite("latent_dim", &zipfmf::SweepOptions::latent_dim)
        .def_readwrite("epochs", &zipfmf::SweepOptions::epochs)
        .def_readwrite("seed", &zipfmf::SweepOptions::seed)
        .def_readwrite("top_k", &zipfmf::SweepOptions::top_k)
        .def_readwrite("lasso_lambda", &zipfmf::SweepOptions::lasso_lambda)
        .def_readwrite("log_guard", &zipfmf::SweepOptions::log_guard)
        .def_readwrite("alpha_per_run", &zipfmf::SweepOptions::alpha_per_run)
        .def_readwrite("jobs", &zipfmf::SweepOptions::jobs)
        .def_readwrite("report_path", &zipfmf::SweepOptions::report_path);

    m.def("load_movielens", &zipfmf::load_movielens, py::arg("ratings_path"),
          py::arg("movies_path") = "");
    m.def("split", &zipfmf::split, py::arg("dataset"), py::arg("test_fraction"),
          py::arg("seed"));

    m.def("init_model", &zipfmf::init_model, py::arg("num_users"),
          py::arg("num_items"), py::arg("dim"), py::arg("seed"),
          py::arg("scale") = zipfmf::RatingScale{});
    m.def("cosine_score", &zipfmf::cosine_score, py::arg("model"), py::arg("i"),
          py::arg("j"));
    m.def("predict_rating", &zipfmf::predict_rating, py::arg("model"),
          py::arg("i"), py::arg("j"));
    m.def("save_model", &zipfmf::save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &zipfmf::load_model, py::arg("path"));

    m.def("pareto_pdf", &zipfmf::pareto_pdf, py::arg("x"), py::arg("x_min"),
          py::arg("k"));
    m.def("zipf_pmf", &zipfmf::zipf_pmf, py::arg("rank"), py::arg("s"),
          py::arg("size"));
    m.def(
        "zipf_exponent_estimate",
        [](const std::vector<double>& values, double x_max) {
            return zipfmf::zipf_exponent_estimate(
                zipfmf::ZipfExponentInput{values, x_max});
        },
        py::arg("values"), py::arg("x_max"));
    m.def("occurrence_profile", &zipfmf::occurrence_profile, py::arg("model"),
          py::arg("top_k"), py::arg("threads") = 1);
    m.def("matthew_degree_from_counts", &zipfmf::matthew_degree_from_counts,
          py::arg("counts"));
    m.def("matthew_degree", &zipfmf::matthew_degree, py::arg("model"),
          py::arg("top_k"));

    m.def(
        "sample_loss",
        [](const zipfmf::FactorModel& model, std::int32_t i, std::int32_t j,
           double r_norm, const zipfmf::AlphaCoefficients* alpha, double beta,
           std::int32_t n_items, double log_guard) {
            return zipfmf::sample_loss(model, i, j, r_norm, alpha, beta,
                                       n_items, log_guard);
        },
        py::arg("model"), py::arg("i"), py::arg("j"), py::arg("r_norm"),
        py::arg("alpha").none(true) = nullptr, py::arg("beta") = 0.0,
        py::arg("n_items") = 1, py::arg("log_guard") = 1e-3);
    m.def(
        "sample_gradient",
        [](const zipfmf::FactorModel& model, std::int32_t i, std::int32_t j,
           double r_norm, const zipfmf::AlphaCoefficients* alpha, double beta,
           std::int32_t n_items, double log_guard) {
            zipfmf::SampleGradient g = zipfmf::sample_gradient(
                model, i, j, r_norm, alpha, beta, n_items, log_guard);
            return py::make_tuple(g.grad_u, g.grad_v, g.loss_value,
                                  g.penalty_active);
        },
        py::arg("model"), py::arg("i"), py::arg("j"), py::arg("r_norm"),
        py::arg("alpha").none(true) = nullptr, py::arg("beta") = 0.0,
        py::arg("n_items") = 1, py::arg("log_guard") = 1e-3);

    m.def("train_vanilla", &zipfmf::train_vanilla, py::arg("train"),
          py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("train_zipf", &zipfmf::train_zipf, py::arg("train"),
          py::arg("config"), py::arg("alpha"),
          py::call_guard<py::gil_scoped_release>());
    m.def("estimate_alpha", &zipfmf::estimate_alpha, py::arg("train"),
          py::arg("stage1_config"), py::arg("top_k"), py::arg("lasso_lambda"),
          py::arg("tol") = 1e-8, py::arg("max_iter") = 1000,
          py::call_guard<py::gil_scoped_release>());

    m.def("evaluate_mae", &zipfmf::evaluate_mae, py::arg("model"),
          py::arg("test"));
    m.def("evaluate_precision_at_k", &zipfmf::evaluate_precision_at_k,
          py::arg("model"), py::arg("test"), py::arg("top_k"));

    m.def("run_lr_sweep", &zipfmf::run_lr_sweep, py::arg("data"),
          py::arg("lr_grid"), py::arg("beta_fixed"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_beta_sweep", &zipfmf::run_beta_sweep, py::arg("data"),
          py::arg("beta_grid"), py::arg("lr_fixed"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_matthew_comparison", &zipfmf::run_matthew_comparison,
          py::arg("data"), py::arg("lr_fixed"), py::arg("beta_grid"),
          py::arg("options"), py::call_guard<py::gil_scoped_release>());
    m.def("default_lr_grid", &zipfmf::default_lr_grid);
    m.def("default_beta_grid", &zipfmf::default_beta_grid);
}
