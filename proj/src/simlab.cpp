#include "ebshrink/simlab.hpp"

#include <algorithm>
#include <cmath>

#include "ebshrink/errors.hpp"
#include "ebshrink/estimators.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/rng.hpp"

namespace ebshrink {

std::string to_string(Family family) {
  switch (family) {
    case Family::kCorrectPrior: return "correct_prior";
    case Family::kMisspecifiedMean: return "misspecified_mean";
    case Family::kHeavyTail: return "heavy_tail";
    case Family::kHiddenSelection: return "hidden_selection";
  }
  return "?";
}

std::string to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::kFaceValue: return "face_value";
    case Estimator::kGlobal: return "global";
    case Estimator::kHybrid: return "hybrid";
  }
  return "?";
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSigma: return "sigma";
    case SweepAxis::kMu: return "mu";
    case SweepAxis::kNu: return "nu";
    case SweepAxis::kRho: return "rho";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "correct_prior") return Family::kCorrectPrior;
  if (name == "misspecified_mean") return Family::kMisspecifiedMean;
  if (name == "heavy_tail") return Family::kHeavyTail;
  if (name == "hidden_selection") return Family::kHiddenSelection;
  throw ConfigError("unknown family: " + name);
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "face_value") return Estimator::kFaceValue;
  if (name == "global") return Estimator::kGlobal;
  if (name == "hybrid") return Estimator::kHybrid;
  throw ConfigError("unknown estimator: " + name);
}

SweepAxis axis_from_string(const std::string& name) {
  if (name == "sigma") return SweepAxis::kSigma;
  if (name == "mu") return SweepAxis::kMu;
  if (name == "nu") return SweepAxis::kNu;
  if (name == "rho") return SweepAxis::kRho;
  throw ConfigError("unknown sweep axis: " + name);
}

void ScenarioConfig::validate() const {
  if (n_experiments == 0) throw ConfigError("n_experiments must be positive");
  const std::size_t want_mu = family == Family::kHiddenSelection ? 2 : 1;
  if (mu.size() != want_mu) {
    throw ConfigError("family " + to_string(family) + " requires " +
                      std::to_string(want_mu) + " mu component(s)");
  }
  for (double m : mu) {
    if (!std::isfinite(m)) throw ConfigError("mu must be finite");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (kappa < 0.0) throw ConfigError("kappa must be >= 0");
  if (family == Family::kHeavyTail) {
    if (!nu || !(*nu > 0.0)) throw ConfigError("heavy_tail requires nu > 0");
  } else if (nu) {
    throw ConfigError("nu is only valid for heavy_tail");
  }
  if (family == Family::kHiddenSelection) {
    if (!rho || !(std::abs(*rho) < 1.0)) {
      throw ConfigError("hidden_selection requires |rho| < 1");
    }
  } else if (rho) {
    throw ConfigError("rho is only valid for hidden_selection");
  }
  if (!std::isfinite(analysis_m0)) throw ConfigError("analysis_m0 must be finite");
  if (!(analysis_tau > 0.0)) throw ConfigError("analysis_tau must be > 0");
  if (!(selection_multiplier > 0.0)) {
    throw ConfigError("selection_multiplier must be > 0");
  }
  if (!(interval_level > 0.0 && interval_level < 1.0)) {
    throw ConfigError("interval_level must lie in (0,1)");
  }
}

bool apply_selection(double theta_hat, double sigma_hat, double multiplier) {
  if (!(sigma_hat > 0.0)) {
    throw InvalidInput("apply_selection: sigma_hat must be > 0");
  }
  return theta_hat > multiplier * sigma_hat;
}

namespace {

SimRecord generate_record(const ScenarioConfig& cfg, std::size_t index) {
  SimRecord rec;
  const double scale = std::sqrt(cfg.epsilon);

  double companion_true = 0.0;
  {
    SubstreamRng rng(cfg.seed, index, Draw::kThetaTrue);
    switch (cfg.family) {
      case Family::kCorrectPrior:
      case Family::kMisspecifiedMean:
        rec.theta_true = rng.normal(cfg.mu[0], scale);
        break;
      case Family::kHeavyTail:
        rec.theta_true = cfg.mu[0] + scale * rng.student_t(*cfg.nu);
        break;
      case Family::kHiddenSelection: {
        const double z1 = rng.normal(0.0, 1.0);
        const double z2 = rng.normal(0.0, 1.0);
        const double r = *cfg.rho;
        companion_true = cfg.mu[0] + scale * z1;
        rec.theta_true =
            cfg.mu[1] + scale * (r * z1 + std::sqrt(1.0 - r * r) * z2);
        break;
      }
    }
  }

  {
    SubstreamRng rng(cfg.seed, index, Draw::kSigmaHat);
    const double raw = rng.normal(cfg.sigma, cfg.kappa);
    rec.sigma_hat = std::max(raw, 1e-6 * cfg.sigma);
  }

  {
    SubstreamRng rng(cfg.seed, index, Draw::kThetaHat);
    rec.theta_hat = rng.normal(rec.theta_true, rec.sigma_hat);
  }

  rec.selected =
      apply_selection(rec.theta_hat, rec.sigma_hat, cfg.selection_multiplier);
  if (cfg.family == Family::kHiddenSelection) {
    SubstreamRng rng(cfg.seed, index, Draw::kCompanion);
    const double companion_hat = rng.normal(companion_true, rec.sigma_hat);
    rec.companion_theta_hat = companion_hat;
    rec.selected = rec.selected && apply_selection(companion_hat, rec.sigma_hat,
                                                   cfg.selection_multiplier);
  }
  return rec;
}

}  // namespace

std::vector<SimRecord> generate_scenario(const ScenarioConfig& cfg,
                                         unsigned num_threads) {
  cfg.validate();
  std::vector<SimRecord> records(cfg.n_experiments);
  parallel_for(
      cfg.n_experiments,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          records[i] = generate_record(cfg, i);
        }
      },
      num_threads);
  return records;
}

std::vector<EstimateTriple> run_estimators(std::span<const SimRecord> records,
                                           const ScenarioConfig& cfg,
                                           unsigned num_threads) {
  cfg.validate();
  const HyperParameters hyper{cfg.analysis_m0, cfg.analysis_tau, 1.0, 1.0};
  const double z = normal_quantile(0.5 + 0.5 * cfg.interval_level);

  std::vector<EstimateTriple> triples(records.size());
  parallel_for(
      records.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const SimRecord& rec = records[i];
          EstimateTriple& t = triples[i];
          t.face_value = {rec.theta_hat, rec.sigma_hat * rec.sigma_hat,
                          rec.theta_hat - z * rec.sigma_hat,
                          rec.theta_hat + z * rec.sigma_hat};
          ExperimentSummary exp;
          exp.theta_hat = rec.theta_hat;
          exp.sigma_hat = rec.sigma_hat;
          t.global_shrink = global_posterior(exp, hyper, cfg.interval_level);
          t.hybrid = hybrid_posterior(exp, hyper, cfg.interval_level);
        }
      },
      num_threads);
  return triples;
}

namespace {

struct EstimatorView {
  double mean;
  double lo;
  double hi;
};

EstimatorView view_of(const EstimateTriple& t, Estimator which) {
  switch (which) {
    case Estimator::kFaceValue:
      return {t.face_value.mean, t.face_value.lo, t.face_value.hi};
    case Estimator::kGlobal:
      return {t.global_shrink.mean, t.global_shrink.interval_lo,
              t.global_shrink.interval_hi};
    case Estimator::kHybrid:
      return {t.hybrid.mean, t.hybrid.interval_lo, t.hybrid.interval_hi};
  }
  throw InvalidInput("unknown estimator");
}

}  // namespace

std::optional<std::vector<MetricsReport>> compute_metrics(
    std::span<const SimRecord> records, std::span<const EstimateTriple> triples,
    bool selected_only) {
  if (records.size() != triples.size()) {
    throw InvalidInput("compute_metrics: records/triples size mismatch");
  }
  std::size_t n_selected = 0;
  for (const SimRecord& r : records) n_selected += r.selected ? 1 : 0;

  std::vector<std::size_t> idx;
  idx.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!selected_only || records[i].selected) idx.push_back(i);
  }
  if (idx.empty()) return std::nullopt;

  const double selection_rate =
      records.empty() ? 0.0
                      : static_cast<double>(n_selected) /
                            static_cast<double>(records.size());

  std::vector<MetricsReport> reports;
  for (Estimator est :
       {Estimator::kFaceValue, Estimator::kGlobal, Estimator::kHybrid}) {
    MetricsReport rep;
    rep.estimator = est;
    double sum_sq = 0.0, sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i : idx) {
      const EstimatorView v = view_of(triples[i], est);
      const double delta = v.mean - records[i].theta_true;
      sum += delta;
      sum_sq += delta * delta;
      if (v.lo <= records[i].theta_true && records[i].theta_true <= v.hi) {
        ++hits;
      }
    }
    const double n = static_cast<double>(idx.size());
    rep.mse = sum_sq / n;
    rep.bias = sum / n;
    rep.coverage = static_cast<double>(hits) / n;
    rep.n_selected = n_selected;
    rep.selection_rate = selection_rate;
    reports.push_back(rep);
  }
  return reports;
}

namespace {

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::kSigma:
      if (!(value > 0.0)) throw ConfigError("sigma grid values must be > 0");
      cfg.sigma = value;
      break;
    case SweepAxis::kMu:
      for (double& m : cfg.mu) m = value;
      break;
    case SweepAxis::kNu:
      if (base.family != Family::kHeavyTail) {
        throw ConfigError("nu sweep requires family heavy_tail");
      }
      if (!(value > 0.0)) throw ConfigError("nu grid values must be > 0");
      cfg.nu = value;
      break;
    case SweepAxis::kRho:
      if (base.family != Family::kHiddenSelection) {
        throw ConfigError("rho sweep requires family hidden_selection");
      }
      if (!(std::abs(value) < 1.0)) {
        throw ConfigError("rho grid values must satisfy |rho| < 1");
      }
      cfg.rho = value;
      break;
  }
  return cfg;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, SweepAxis axis,
                                std::span<const double> grid,
                                std::span<const std::uint64_t> seeds,
                                bool selected_only, unsigned num_threads) {
  if (grid.empty()) throw ConfigError("run_sweep: empty grid");
  if (seeds.empty()) throw ConfigError("run_sweep: empty seed list");
  base.validate();

  std::vector<SweepRow> rows;
  rows.reserve(grid.size() * seeds.size() * 3);
  for (double value : grid) {
    for (std::uint64_t seed : seeds) {
      ScenarioConfig cfg = apply_axis(base, axis, value);
      cfg.seed = seed;
      const auto records = generate_scenario(cfg, num_threads);
      const auto triples = run_estimators(records, cfg, num_threads);
      const auto metrics = compute_metrics(records, triples, selected_only);
      if (!metrics) {
        throw AbsentMetrics("run_sweep: no records in subset at " +
                            to_string(axis) + "=" + format_double(value) +
                            ", seed=" + std::to_string(seed));
      }
      for (const MetricsReport& rep : *metrics) {
        rows.push_back({axis, value, seed, rep});
      }
    }
  }
  return rows;
}

}  // namespace ebshrink
