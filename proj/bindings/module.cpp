#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <vector>

#include "ebshrink/csv.hpp"
#include "ebshrink/diagnostics.hpp"
#include "ebshrink/errors.hpp"
#include "ebshrink/estimators.hpp"
#include "ebshrink/hyperfit.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/simlab.hpp"
#include "ebshrink/store.hpp"

namespace py = pybind11;
using namespace ebshrink;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Empirical-Bayes shrinkage toolkit: winner's-curse correction for "
            "A/B experiment collections";

  py::register_exception<InvalidInput>(m, "InvalidInputError",
                                       PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_KeyError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<AbsentMetrics>(m, "AbsentMetricsError",
                                        PyExc_RuntimeError);

  py::enum_<Convention>(m, "Convention")
      .value("RATIO", Convention::kRatio)
      .value("RATIO_MINUS_ONE", Convention::kRatioMinusOne);
  py::enum_<GapMode>(m, "GapMode")
      .value("HYBRID", GapMode::kHybrid)
      .value("GLOBAL", GapMode::kGlobal);
  py::enum_<Family>(m, "Family")
      .value("CORRECT_PRIOR", Family::kCorrectPrior)
      .value("MISSPECIFIED_MEAN", Family::kMisspecifiedMean)
      .value("HEAVY_TAIL", Family::kHeavyTail)
      .value("HIDDEN_SELECTION", Family::kHiddenSelection);
  py::enum_<Estimator>(m, "Estimator")
      .value("FACE_VALUE", Estimator::kFaceValue)
      .value("GLOBAL", Estimator::kGlobal)
      .value("HYBRID", Estimator::kHybrid);
  py::enum_<SweepAxis>(m, "SweepAxis")
      .value("SIGMA", SweepAxis::kSigma)
      .value("MU", SweepAxis::kMu)
      .value("NU", SweepAxis::kNu)
      .value("RHO", SweepAxis::kRho);
  py::enum_<CheckStatistic>(m, "CheckStatistic")
      .value("MEAN", CheckStatistic::kMean)
      .value("MAX", CheckStatistic::kMax)
      .value("SD", CheckStatistic::kSd)
      .value("CUSTOM", CheckStatistic::kCustom);

  py::class_<UnitData>(m, "UnitData")
      .def(py::init<>())
      .def(py::init([](std::vector<double> outcomes,
                       std::vector<int> assignments) {
             UnitData data{std::move(outcomes), std::move(assignments)};
             data.validate();
             return data;
           }),
           py::arg("outcomes"), py::arg("assignments"))
      .def_readwrite("outcomes", &UnitData::outcomes)
      .def_readwrite("assignments", &UnitData::assignments);

  py::class_<ExperimentSummary>(m, "ExperimentSummary")
      .def(py::init<>())
      .def(py::init([](std::string id, double theta_hat, double sigma_hat,
                       std::optional<bool> selected) {
             return ExperimentSummary{std::move(id), theta_hat, sigma_hat,
                                      selected};
           }),
           py::arg("id"), py::arg("theta_hat"), py::arg("sigma_hat"),
           py::arg("selected") = std::nullopt)
      .def_readwrite("id", &ExperimentSummary::id)
      .def_readwrite("theta_hat", &ExperimentSummary::theta_hat)
      .def_readwrite("sigma_hat", &ExperimentSummary::sigma_hat)
      .def_readwrite("selected", &ExperimentSummary::selected)
      .def("__repr__", [](const ExperimentSummary& e) {
        return "ExperimentSummary(id='" + e.id +
               "', theta_hat=" + format_double(e.theta_hat) +
               ", sigma_hat=" + format_double(e.sigma_hat) + ")";
      });

  py::class_<HyperParameters>(m, "HyperParameters")
      .def(py::init<>())
      .def(py::init([](double m0, double tau, double a, double b) {
             HyperParameters h{m0, tau, a, b};
             h.validate();
             return h;
           }),
           py::arg("m0") = 0.0, py::arg("tau") = 1.0, py::arg("a") = 1.0,
           py::arg("b") = 1.0)
      .def_readwrite("m0", &HyperParameters::m0)
      .def_readwrite("tau", &HyperParameters::tau)
      .def_readwrite("a", &HyperParameters::a)
      .def_readwrite("b", &HyperParameters::b)
      .def("__repr__", [](const HyperParameters& h) {
        return "HyperParameters(m0=" + format_double(h.m0) +
               ", tau=" + format_double(h.tau) + ", a=" + format_double(h.a) +
               ", b=" + format_double(h.b) + ")";
      });

  py::class_<PosteriorSummary>(m, "PosteriorSummary")
      .def(py::init<>())
      .def_readwrite("mean", &PosteriorSummary::mean)
      .def_readwrite("variance", &PosteriorSummary::variance)
      .def_readwrite("lambda_used", &PosteriorSummary::lambda_used)
      .def_readwrite("interval_level", &PosteriorSummary::interval_level)
      .def_readwrite("interval_lo", &PosteriorSummary::interval_lo)
      .def_readwrite("interval_hi", &PosteriorSummary::interval_hi)
      .def("__repr__", [](const PosteriorSummary& p) {
        return "PosteriorSummary(mean=" + format_double(p.mean) +
               ", variance=" + format_double(p.variance) +
               ", lambda_used=" + format_double(p.lambda_used) + ")";
      });

  py::class_<AggregateEstimate>(m, "AggregateEstimate")
      .def(py::init<>())
      .def_readwrite("mean", &AggregateEstimate::mean)
      .def_readwrite("variance", &AggregateEstimate::variance)
      .def_readwrite("n_experiments", &AggregateEstimate::n_experiments)
      .def_readwrite("interval_level", &AggregateEstimate::interval_level)
      .def_readwrite("interval_lo", &AggregateEstimate::interval_lo)
      .def_readwrite("interval_hi", &AggregateEstimate::interval_hi);

  py::class_<CuratedObservation>(m, "CuratedObservation")
      .def(py::init<>())
      .def(py::init([](double eta_hat, double gamma) {
             CuratedObservation obs{eta_hat, gamma};
             obs.validate();
             return obs;
           }),
           py::arg("eta_hat"), py::arg("gamma"))
      .def_readwrite("eta_hat", &CuratedObservation::eta_hat)
      .def_readwrite("gamma", &CuratedObservation::gamma);

  py::class_<InverseGammaParams>(m, "InverseGammaParams")
      .def(py::init<>())
      .def_readwrite("shape", &InverseGammaParams::shape)
      .def_readwrite("scale", &InverseGammaParams::scale);

  py::class_<GibbsSummary>(m, "GibbsSummary")
      .def_readonly("lambda_mean", &GibbsSummary::lambda_mean)
      .def_readonly("lambda_mode_estimate", &GibbsSummary::lambda_mode_estimate)
      .def_readonly("theta_mean", &GibbsSummary::theta_mean)
      .def_readonly("theta_variance", &GibbsSummary::theta_variance)
      .def_readonly("n_kept", &GibbsSummary::n_kept);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("family", &ScenarioConfig::family)
      .def_readwrite("n_experiments", &ScenarioConfig::n_experiments)
      .def_readwrite("mu", &ScenarioConfig::mu)
      .def_readwrite("epsilon", &ScenarioConfig::epsilon)
      .def_readwrite("sigma", &ScenarioConfig::sigma)
      .def_readwrite("kappa", &ScenarioConfig::kappa)
      .def_readwrite("nu", &ScenarioConfig::nu)
      .def_readwrite("rho", &ScenarioConfig::rho)
      .def_readwrite("analysis_m0", &ScenarioConfig::analysis_m0)
      .def_readwrite("analysis_tau", &ScenarioConfig::analysis_tau)
      .def_readwrite("selection_multiplier",
                     &ScenarioConfig::selection_multiplier)
      .def_readwrite("interval_level", &ScenarioConfig::interval_level)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def("validate", &ScenarioConfig::validate);

  py::class_<SimRecord>(m, "SimRecord")
      .def_readonly("theta_true", &SimRecord::theta_true)
      .def_readonly("theta_hat", &SimRecord::theta_hat)
      .def_readonly("sigma_hat", &SimRecord::sigma_hat)
      .def_readonly("selected", &SimRecord::selected)
      .def_readonly("companion_theta_hat", &SimRecord::companion_theta_hat);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("estimator", &MetricsReport::estimator)
      .def_readonly("mse", &MetricsReport::mse)
      .def_readonly("bias", &MetricsReport::bias)
      .def_readonly("coverage", &MetricsReport::coverage)
      .def_readonly("n_selected", &MetricsReport::n_selected)
      .def_readonly("selection_rate", &MetricsReport::selection_rate)
      .def("__repr__", [](const MetricsReport& r) {
        return "MetricsReport(" + to_string(r.estimator) +
               ", mse=" + format_double(r.mse) +
               ", bias=" + format_double(r.bias) +
               ", coverage=" + format_double(r.coverage) + ")";
      });

  py::class_<IntervalEstimate>(m, "IntervalEstimate")
      .def_readonly("mean", &IntervalEstimate::mean)
      .def_readonly("variance", &IntervalEstimate::variance)
      .def_readonly("lo", &IntervalEstimate::lo)
      .def_readonly("hi", &IntervalEstimate::hi);

  py::class_<EstimateTriple>(m, "EstimateTriple")
      .def_readonly("face_value", &EstimateTriple::face_value)
      .def_readonly("global_shrink", &EstimateTriple::global_shrink)
      .def_readonly("hybrid", &EstimateTriple::hybrid);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("axis", &SweepRow::axis)
      .def_readonly("axis_value", &SweepRow::axis_value)
      .def_readonly("seed", &SweepRow::seed)
      .def_readonly("metrics", &SweepRow::metrics);

  py::class_<CheckReport>(m, "CheckReport")
      .def_readonly("statistic_name", &CheckReport::statistic_name)
      .def_readonly("observed", &CheckReport::observed)
      .def_readonly("tail_area_p", &CheckReport::tail_area_p)
      .def_readonly("n_replicates", &CheckReport::n_replicates);

  py::class_<ReplicationPair>(m, "ReplicationPair")
      .def(py::init<>())
      .def(py::init([](ExperimentSummary original,
                       ExperimentSummary replication) {
             return ReplicationPair{std::move(original), std::move(replication)};
           }),
           py::arg("original"), py::arg("replication"))
      .def_readwrite("original", &ReplicationPair::original)
      .def_readwrite("replication", &ReplicationPair::replication);

  py::class_<ReplicationMae>(m, "ReplicationMae")
      .def_readonly("face_value", &ReplicationMae::face_value)
      .def_readonly("global_shrink", &ReplicationMae::global_shrink)
      .def_readonly("hybrid", &ReplicationMae::hybrid)
      .def_readonly("n_pairs", &ReplicationMae::n_pairs);

  // estimators
  m.def("face_value_estimate", &face_value_estimate, py::arg("data"),
        py::arg("convention") = Convention::kRatioMinusOne,
        py::arg("id") = std::string{},
        "Ratio-of-means effect with a delta-method standard error");
  m.def("shrinkage_posterior", &shrinkage_posterior, py::arg("exp"),
        py::arg("hyper"), py::arg("lam"), py::arg("level") = 0.9);
  m.def("global_posterior", &global_posterior, py::arg("exp"), py::arg("hyper"),
        py::arg("level") = 0.9);
  m.def("hybrid_posterior", &hybrid_posterior, py::arg("exp"), py::arg("hyper"),
        py::arg("level") = 0.9);
  m.def("shrinkage_gap", &shrinkage_gap, py::arg("theta_hat"),
        py::arg("sigma_sq"), py::arg("tau_star"), py::arg("mode"));
  m.def(
      "aggregate",
      [](const std::vector<PosteriorSummary>& posteriors, double level) {
        return aggregate(posteriors, level);
      },
      py::arg("posteriors"), py::arg("level") = 0.9);

  // hyperfit
  m.def(
      "fit_tau",
      [](const std::vector<CuratedObservation>& obs,
         std::optional<double> tau_max) { return fit_tau(obs, tau_max); },
      py::arg("obs"), py::arg("tau_max") = std::nullopt);
  m.def(
      "curated_log_likelihood",
      [](const std::vector<CuratedObservation>& obs, double tau) {
        return curated_log_likelihood(obs, tau);
      },
      py::arg("obs"), py::arg("tau"));
  m.def("lambda_conditional", &lambda_conditional, py::arg("theta"),
        py::arg("hyper"));
  m.def("lambda_mode", &lambda_mode, py::arg("theta_hat"), py::arg("tau_star"),
        py::arg("m0") = 0.0);
  m.def("gibbs_lambda_oracle", &gibbs_lambda_oracle, py::arg("exp"),
        py::arg("hyper"), py::arg("iterations"),
        py::arg("burn_in") = std::nullopt, py::arg("seed") = 0);

  // simlab
  m.def("apply_selection", &apply_selection, py::arg("theta_hat"),
        py::arg("sigma_hat"), py::arg("multiplier") = 1.96);
  m.def("generate_scenario", &generate_scenario, py::arg("cfg"),
        py::arg("num_threads") = 0);
  m.def(
      "run_estimators",
      [](const std::vector<SimRecord>& records, const ScenarioConfig& cfg,
         unsigned num_threads) {
        return run_estimators(records, cfg, num_threads);
      },
      py::arg("records"), py::arg("cfg"), py::arg("num_threads") = 0);
  m.def(
      "compute_metrics",
      [](const std::vector<SimRecord>& records,
         const std::vector<EstimateTriple>& triples, bool selected_only) {
        return compute_metrics(records, triples, selected_only);
      },
      py::arg("records"), py::arg("triples"), py::arg("selected_only") = true);
  m.def(
      "run_sweep",
      [](const ScenarioConfig& base, SweepAxis axis,
         const std::vector<double>& grid,
         const std::vector<std::uint64_t>& seeds, bool selected_only,
         unsigned num_threads) {
        return run_sweep(base, axis, grid, seeds, selected_only, num_threads);
      },
      py::arg("base"), py::arg("axis"), py::arg("grid"), py::arg("seeds"),
      py::arg("selected_only") = true, py::arg("num_threads") = 0);

  // diagnostics
  m.def(
      "posterior_predictive_replicate",
      [](const std::vector<ExperimentSummary>& exps,
         const HyperParameters& hyper, Estimator estimator,
         std::size_t n_replicates, std::uint64_t seed, unsigned num_threads) {
        return posterior_predictive_replicate(exps, hyper, estimator,
                                              n_replicates, seed, num_threads);
      },
      py::arg("exps"), py::arg("hyper"),
      py::arg("estimator") = Estimator::kHybrid, py::arg("n_replicates"),
      py::arg("seed") = 0, py::arg("num_threads") = 0);
  m.def(
      "tail_area_probability",
      [](const std::vector<ExperimentSummary>& observed,
         const ReplicateMatrix& replicates, CheckStatistic statistic,
         const std::optional<std::function<double(std::vector<double>)>>&
             custom,
         const std::string& custom_name) {
        CollectionStatistic wrapped;
        if (custom) {
          wrapped = [fn = *custom](std::span<const double> xs) {
            return fn(std::vector<double>(xs.begin(), xs.end()));
          };
        }
        return tail_area_probability(observed, replicates, statistic, wrapped,
                                     custom_name);
      },
      py::arg("observed"), py::arg("replicates"),
      py::arg("statistic") = CheckStatistic::kMean,
      py::arg("custom") = std::nullopt, py::arg("custom_name") = "custom");
  m.def(
      "evaluate_replication_pairs",
      [](const std::vector<ReplicationPair>& pairs,
         const HyperParameters& hyper) {
        return evaluate_replication_pairs(pairs, hyper);
      },
      py::arg("pairs"), py::arg("hyper"));
  m.def(
      "interval_hit_fraction",
      [](const std::vector<double>& truths,
         const std::vector<IntervalEstimate>& intervals) {
        return interval_hit_fraction(truths, intervals);
      },
      py::arg("truths"), py::arg("intervals"));

  // io
  m.def("parse_experiments", &parse_experiments, py::arg("path"));
  m.def(
      "write_experiments",
      [](const std::filesystem::path& path,
         const std::vector<ExperimentSummary>& exps) {
        write_experiments(path, exps);
      },
      py::arg("path"), py::arg("exps"));
  m.def("parse_curated", &parse_curated, py::arg("path"));
  m.def("parse_pairs", &parse_pairs, py::arg("path"));
  m.def(
      "store_hyperparams",
      [](const std::filesystem::path& path, const std::string& ns,
         const HyperParameters& hyper, const std::string& source) {
        store_hyperparams(path, ns, {hyper, iso8601_utc_now(), source});
      },
      py::arg("path"), py::arg("namespace"), py::arg("hyper"),
      py::arg("source") = std::string{});
  m.def("load_hyperparams", &load_hyperparams, py::arg("path"),
        py::arg("namespace"));
}
