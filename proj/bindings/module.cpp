#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/inference.hpp"
#include "crowdcheck/null_models.hpp"
#include "crowdcheck/panel.hpp"
#include "crowdcheck/report.hpp"
#include "crowdcheck/rng.hpp"
#include "crowdcheck/stats.hpp"

namespace py = pybind11;
namespace cc = crowdcheck;

namespace {

cc::SummaryStats summarize_values(const std::vector<double>& values, double truth) {
    return cc::summarize(values, truth);
}

cc::Dataset load_dataset(const std::string& forecasts, const std::string& truths,
                         std::size_t min_n, const std::string& sentinel) {
    std::ifstream f(forecasts);
    if (!f) throw cc::DataError("cannot open " + forecasts);
    std::ifstream t(truths);
    if (!t) throw cc::DataError("cannot open " + truths);
    cc::CsvSchema schema;
    schema.missing_sentinel = sentinel;
    const auto parsed = cc::parse_forecast_csv(f, schema);
    const auto table = cc::parse_truth_csv(t);
    return cc::assemble_experiments(parsed.records, table, min_n).dataset;
}

cc::Experiment load_guessing(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cc::DataError("cannot open " + path);
    return cc::parse_guessing_file(in);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "wisdom-of-crowds diagnostics for forecast panels";

    py::register_exception<cc::Error>(m, "CrowdcheckError", PyExc_ValueError);

    py::class_<cc::Estimate>(m, "Estimate")
        .def_readonly("forecaster_id", &cc::Estimate::forecaster_id)
        .def_readonly("value", &cc::Estimate::value);

    py::class_<cc::Experiment>(m, "Experiment")
        .def_readonly("id", &cc::Experiment::id)
        .def_readonly("indicator", &cc::Experiment::indicator)
        .def_readonly("horizon", &cc::Experiment::horizon)
        .def_readonly("survey_period", &cc::Experiment::survey_period)
        .def_readonly("truth", &cc::Experiment::truth)
        .def_readonly("estimates", &cc::Experiment::estimates)
        .def("values", &cc::Experiment::values)
        .def("__len__", &cc::Experiment::size)
        .def("__repr__", [](const cc::Experiment& e) {
            return "<Experiment " + e.id + " n=" + std::to_string(e.size()) + ">";
        });

    py::class_<cc::Dataset>(m, "Dataset")
        .def_readonly("experiments", &cc::Dataset::experiments)
        .def_readonly("provenance", &cc::Dataset::provenance)
        .def("__len__",
             [](const cc::Dataset& d) { return d.experiments.size(); });

    py::class_<cc::Decomposition>(m, "Decomposition")
        .def_readonly("gamma", &cc::Decomposition::gamma)
        .def_readonly("eps", &cc::Decomposition::eps)
        .def_readonly("delta", &cc::Decomposition::delta);

    py::class_<cc::SummaryStats>(m, "SummaryStats")
        .def_readonly("n", &cc::SummaryStats::n)
        .def_readonly("truth", &cc::SummaryStats::truth)
        .def_readonly("mean", &cc::SummaryStats::mean)
        .def_readonly("gamma", &cc::SummaryStats::gamma)
        .def_readonly("eps", &cc::SummaryStats::eps)
        .def_readonly("delta", &cc::SummaryStats::delta)
        .def_readonly("skew", &cc::SummaryStats::skew)
        .def_readonly("xi", &cc::SummaryStats::xi)
        .def_readonly("scaled_error_signed", &cc::SummaryStats::scaled_error_signed)
        .def_readonly("scaled_error_abs", &cc::SummaryStats::scaled_error_abs)
        .def_readonly("scaled_rmse", &cc::SummaryStats::scaled_rmse)
        .def_readonly("scaled_diversity", &cc::SummaryStats::scaled_diversity)
        .def_readonly("dpt_residual", &cc::SummaryStats::dpt_residual);

    py::class_<cc::CorrelationResult>(m, "CorrelationResult")
        .def_readonly("rho", &cc::CorrelationResult::rho)
        .def_readonly("p_value", &cc::CorrelationResult::p_value)
        .def_readonly("n_pairs", &cc::CorrelationResult::n_pairs)
        .def_readonly("n_perm", &cc::CorrelationResult::n_perm)
        .def_property_readonly("method", [](const cc::CorrelationResult& r) {
            return std::string(cc::to_string(r.method));
        });

    py::class_<cc::BiasTestResult>(m, "BiasTestResult")
        .def_readonly("p_value", &cc::BiasTestResult::p_value)
        .def_readonly("z", &cc::BiasTestResult::z);

    m.def("crowd_mean",
          [](const std::vector<double>& v) { return cc::crowd_mean(v); },
          py::arg("values"));
    m.def("diversity_decomposition",
          [](const std::vector<double>& v, double truth) {
              return cc::diversity_decomposition(v, truth);
          },
          py::arg("values"), py::arg("truth"));
    m.def("skewness", [](const std::vector<double>& v) { return cc::skewness(v); },
          py::arg("values"));
    m.def("fraction_beating_crowd",
          [](const std::vector<double>& v, double truth) {
              return cc::fraction_beating_crowd(v, truth);
          },
          py::arg("values"), py::arg("truth"));
    m.def("summarize", &summarize_values, py::arg("values"), py::arg("truth"));
    m.def("summarize_experiment",
          [](const cc::Experiment& e) { return cc::summarize(e); }, py::arg("experiment"));

    m.def("erf", &cc::erf, py::arg("x"));
    m.def("erfc", &cc::erfc, py::arg("x"));
    m.def("average_ranks",
          [](const std::vector<double>& v) { return cc::average_ranks(v); },
          py::arg("values"));
    m.def("spearman_rho",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return cc::spearman_rho(x, y);
          },
          py::arg("x"), py::arg("y"));
    m.def("pearson_r",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return cc::pearson_r(x, y);
          },
          py::arg("x"), py::arg("y"));
    m.def(
        "correlation_p",
        [](const std::vector<double>& x, const std::vector<double>& y,
           std::uint64_t n_perm, std::uint64_t seed, const std::string& stat) {
            return cc::correlation_p(x, y, n_perm, seed, cc::parse_correlation_stat(stat));
        },
        py::arg("x"), py::arg("y"), py::arg("n_perm") = 100000, py::arg("seed") = 0,
        py::arg("stat") = "spearman");
    m.def("bias_p_value", &cc::bias_p_value, py::arg("mean"), py::arg("truth"),
          py::arg("delta"), py::arg("n"));

    m.def(
        "sample_unbiased_panel",
        [](double truth, double delta, std::size_t n, std::uint64_t seed) {
            return cc::sample_unbiased_panel(cc::UnbiasedPanelConfig{truth, delta, n, seed});
        },
        py::arg("truth"), py::arg("delta"), py::arg("n"), py::arg("seed") = 0);
    m.def(
        "sample_quincunx_panel",
        [](double g_hat, const std::vector<double>& cues, double p_cue, std::size_t n,
           std::uint64_t seed) {
            cc::QuincunxParams params;
            params.g_hat = g_hat;
            params.cues = cues;
            params.p_cue = p_cue;
            params.seed = seed;
            return cc::sample_quincunx_panel(params, n);
        },
        py::arg("g_hat"), py::arg("cues"), py::arg("p_cue") = 0.7, py::arg("n") = 40,
        py::arg("seed") = 0);
    m.def(
        "unbiased_ensemble",
        [](std::size_t panels, double truth, double delta, std::size_t n_min,
           std::size_t n_max, std::uint64_t seed) {
            cc::UnbiasedEnsembleConfig cfg;
            cfg.truth = truth;
            cfg.delta = delta;
            cfg.n_min = n_min;
            cfg.n_max = n_max;
            return cc::unbiased_ensemble(cfg, panels, seed).dataset;
        },
        py::arg("panels"), py::arg("truth") = 100.0, py::arg("delta") = 25.0,
        py::arg("n_min") = 9, py::arg("n_max") = 87, py::arg("seed") = 0);
    m.def(
        "quincunx_ensemble",
        [](std::size_t experiments, std::size_t n_per, double g_hat, std::size_t cues,
           double cue_min, double cue_max, double p_cue, bool zero_sum_cues,
           std::uint64_t seed) {
            cc::QuincunxEnsembleConfig cfg;
            cfg.g_hat = g_hat;
            cfg.n_cues = cues;
            cfg.cue_min = cue_min;
            cfg.cue_max = cue_max;
            cfg.p_cue = p_cue;
            cfg.zero_sum_cues = zero_sum_cues;
            return cc::quincunx_ensemble(cfg, experiments, n_per, seed);
        },
        py::arg("experiments") = 500, py::arg("n_per") = 40, py::arg("g_hat") = 1000.0,
        py::arg("cues") = 10, py::arg("cue_min") = -50.0, py::arg("cue_max") = 50.0,
        py::arg("p_cue") = 0.7, py::arg("zero_sum_cues") = false, py::arg("seed") = 0);
    m.def(
        "replicate_unbiased",
        [](const cc::Dataset& original, std::uint64_t seed) {
            auto result = cc::replicate_dataset_unbiased(original, seed);
            std::map<std::string, double> deltas(result.generator_deltas.begin(),
                                                 result.generator_deltas.end());
            return py::make_tuple(std::move(result.dataset), std::move(deltas));
        },
        py::arg("dataset"), py::arg("seed") = 0,
        "Redraw every panel from the unbiased null; returns (dataset, "
        "generator delta by experiment id).");

    m.def("load_dataset", &load_dataset, py::arg("forecasts"), py::arg("truths"),
          py::arg("min_n") = 2, py::arg("missing_sentinel") = "#N/A");
    m.def("load_guessing_file", &load_guessing, py::arg("path"));
}
