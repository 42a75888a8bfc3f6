#include "ebshrink/estimators.hpp"

#include <cmath>
#include <utility>

#include "ebshrink/errors.hpp"
#include "ebshrink/math.hpp"

namespace ebshrink {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("interval level must lie in (0,1)");
  }
}

std::pair<double, double> central_interval(double mean, double variance,
                                           double level) {
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double half = z * std::sqrt(variance);
  return {mean - half, mean + half};
}

struct ArmStats {
  double mean = 0.0;
  double variance = 0.0;  // sample variance, 0 for a single unit
  std::size_t n = 0;
};

ArmStats arm_stats(const UnitData& data, int arm) {
  std::vector<double> ys;
  ys.reserve(data.outcomes.size());
  for (std::size_t i = 0; i < data.outcomes.size(); ++i) {
    if (data.assignments[i] == arm) ys.push_back(data.outcomes[i]);
  }
  return {mean(ys), sample_variance(ys), ys.size()};
}

}  // namespace

ExperimentSummary face_value_estimate(const UnitData& data,
                                      Convention convention, std::string id) {
  data.validate();
  const ArmStats treated = arm_stats(data, 1);
  const ArmStats control = arm_stats(data, 0);
  if (control.mean == 0.0) {
    throw DegenerateDenominator("face_value_estimate: control mean is zero");
  }

  const double ratio = treated.mean / control.mean;
  const double theta =
      convention == Convention::kRatio ? ratio : ratio - 1.0;

  // Delta method for a ratio of independent sample means.
  const double c2 = control.mean * control.mean;
  const double se2 =
      treated.variance / (static_cast<double>(treated.n) * c2) +
      treated.mean * treated.mean * control.variance /
          (static_cast<double>(control.n) * c2 * c2);

  ExperimentSummary out;
  out.id = std::move(id);
  out.theta_hat = theta;
  out.sigma_hat = std::sqrt(se2);
  return out;
}

PosteriorSummary shrinkage_posterior(const ExperimentSummary& exp,
                                     const HyperParameters& hyper,
                                     double lambda, double level) {
  exp.validate();
  hyper.validate();
  check_level(level);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("shrinkage_posterior: lambda must be > 0");
  }

  const double s2 = exp.sigma_hat * exp.sigma_hat;
  const double prior_var = lambda * hyper.tau;
  const double w = s2 / (s2 + prior_var);

  PosteriorSummary post;
  post.mean = w * hyper.m0 + (1.0 - w) * exp.theta_hat;
  post.variance = 1.0 / (1.0 / s2 + 1.0 / prior_var);
  post.lambda_used = lambda;
  post.interval_level = level;
  std::tie(post.interval_lo, post.interval_hi) =
      central_interval(post.mean, post.variance, level);
  return post;
}

PosteriorSummary global_posterior(const ExperimentSummary& exp,
                                  const HyperParameters& hyper, double level) {
  return shrinkage_posterior(exp, hyper, 1.0, level);
}

PosteriorSummary hybrid_posterior(const ExperimentSummary& exp,
                                  const HyperParameters& hyper, double level) {
  hyper.validate();
  if (hyper.a != 1.0 || hyper.b != 1.0) {
    throw UnsupportedHyperparameters(
        "hybrid_posterior: closed form requires a = b = 1");
  }
  const double d = exp.theta_hat - hyper.m0;
  const double lambda_star = (d * d + hyper.tau) / (4.0 * hyper.tau);
  return shrinkage_posterior(exp, hyper, lambda_star, level);
}

double shrinkage_gap(double theta_hat, double sigma_sq, double tau_star,
                     GapMode mode) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw InvalidInput("shrinkage_gap: sigma_sq must be > 0");
  }
  if (!(tau_star > 0.0) || !std::isfinite(tau_star)) {
    throw InvalidInput("shrinkage_gap: tau_star must be > 0");
  }
  const double abs_theta = std::abs(theta_hat);
  switch (mode) {
    case GapMode::kHybrid:
      return 4.0 * sigma_sq * abs_theta /
             (theta_hat * theta_hat + tau_star + 4.0 * sigma_sq);
    case GapMode::kGlobal:
      return abs_theta * sigma_sq / (tau_star + sigma_sq);
  }
  throw InvalidInput("shrinkage_gap: unknown mode");
}

AggregateEstimate aggregate(std::span<const PosteriorSummary> posteriors,
                            double level) {
  if (posteriors.empty()) {
    throw InvalidInput("aggregate: empty posterior list");
  }
  check_level(level);
  AggregateEstimate agg;
  for (const PosteriorSummary& p : posteriors) {
    agg.mean += p.mean;
    agg.variance += p.variance;
  }
  agg.n_experiments = posteriors.size();
  agg.interval_level = level;
  std::tie(agg.interval_lo, agg.interval_hi) =
      central_interval(agg.mean, agg.variance, level);
  return agg;
}

}  // namespace ebshrink
