#include "ebshrink/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ebshrink/errors.hpp"
#include "ebshrink/estimators.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/rng.hpp"

namespace ebshrink {

ReplicateMatrix posterior_predictive_replicate(
    std::span<const ExperimentSummary> exps, const HyperParameters& hyper,
    Estimator estimator, std::size_t n_replicates, std::uint64_t seed,
    unsigned num_threads) {
  if (exps.empty()) {
    throw InvalidInput("posterior_predictive_replicate: empty experiment list");
  }
  if (n_replicates == 0) {
    throw InvalidInput("posterior_predictive_replicate: n_replicates must be positive");
  }
  if (estimator == Estimator::kFaceValue) {
    throw InvalidInput(
        "posterior_predictive_replicate: estimator must be global or hybrid");
  }
  hyper.validate();

  // Fit once; replicates reuse the same posteriors.
  std::vector<PosteriorSummary> posteriors;
  posteriors.reserve(exps.size());
  for (const ExperimentSummary& e : exps) {
    posteriors.push_back(estimator == Estimator::kGlobal
                             ? global_posterior(e, hyper, 0.9)
                             : hybrid_posterior(e, hyper, 0.9));
  }

  ReplicateMatrix replicates(n_replicates,
                             std::vector<double>(exps.size(), 0.0));
  parallel_for(
      n_replicates,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          // One substream pair per replicate; rows are the parallel unit.
          SubstreamRng theta_rng(seed, r, Draw::kReplicateTheta);
          SubstreamRng obs_rng(seed, r, Draw::kReplicateObs);
          for (std::size_t e = 0; e < exps.size(); ++e) {
            const double theta = theta_rng.normal(
                posteriors[e].mean, std::sqrt(posteriors[e].variance));
            replicates[r][e] = obs_rng.normal(theta, exps[e].sigma_hat);
          }
        }
      },
      num_threads);
  return replicates;
}

namespace {

double eval_statistic(CheckStatistic statistic, std::span<const double> xs,
                      const CollectionStatistic& custom) {
  switch (statistic) {
    case CheckStatistic::kMean:
      return mean(xs);
    case CheckStatistic::kMax:
      return *std::max_element(xs.begin(), xs.end());
    case CheckStatistic::kSd:
      return sample_sd(xs);
    case CheckStatistic::kCustom:
      if (!custom) {
        throw ConfigError("tail_area_probability: custom statistic missing");
      }
      return custom(xs);
  }
  throw ConfigError("tail_area_probability: unknown statistic");
}

std::string statistic_name(CheckStatistic statistic,
                           const std::string& custom_name) {
  switch (statistic) {
    case CheckStatistic::kMean: return "mean";
    case CheckStatistic::kMax: return "max";
    case CheckStatistic::kSd: return "sd";
    case CheckStatistic::kCustom: return custom_name;
  }
  return "?";
}

}  // namespace

CheckReport tail_area_probability(std::span<const ExperimentSummary> observed,
                                  const ReplicateMatrix& replicates,
                                  CheckStatistic statistic,
                                  const CollectionStatistic& custom,
                                  const std::string& custom_name) {
  if (observed.empty()) {
    throw InvalidInput("tail_area_probability: empty observed list");
  }
  if (replicates.empty()) {
    throw InvalidInput("tail_area_probability: empty replicate set");
  }
  for (const auto& row : replicates) {
    if (row.size() != observed.size()) {
      throw InvalidInput(
          "tail_area_probability: replicate width does not match observed");
    }
  }

  std::vector<double> obs_values;
  obs_values.reserve(observed.size());
  for (const ExperimentSummary& e : observed) obs_values.push_back(e.theta_hat);
  const double observed_stat = eval_statistic(statistic, obs_values, custom);

  std::size_t tail = 0;
  for (const auto& row : replicates) {
    if (eval_statistic(statistic, row, custom) >= observed_stat) ++tail;
  }

  CheckReport report;
  report.statistic_name = statistic_name(statistic, custom_name);
  report.observed = observed_stat;
  report.tail_area_p =
      static_cast<double>(tail) / static_cast<double>(replicates.size());
  report.n_replicates = replicates.size();
  return report;
}

ReplicationMae evaluate_replication_pairs(std::span<const ReplicationPair> pairs,
                                          const HyperParameters& hyper) {
  if (pairs.empty()) {
    throw InvalidInput("evaluate_replication_pairs: empty pair list");
  }
  hyper.validate();

  double fv = 0.0, glob = 0.0, hyb = 0.0;
  for (const ReplicationPair& pair : pairs) {
    pair.original.validate();
    pair.replication.validate();
    const double target = pair.replication.theta_hat;
    fv += std::abs(pair.original.theta_hat - target);
    glob += std::abs(global_posterior(pair.original, hyper, 0.9).mean - target);
    hyb += std::abs(hybrid_posterior(pair.original, hyper, 0.9).mean - target);
  }
  const double n = static_cast<double>(pairs.size());
  return {fv / n, glob / n, hyb / n, pairs.size()};
}

double interval_hit_fraction(std::span<const double> truths,
                             std::span<const IntervalEstimate> intervals) {
  if (truths.size() != intervals.size() || truths.empty()) {
    throw InvalidInput("interval_hit_fraction: length mismatch or empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (intervals[i].lo <= truths[i] && truths[i] <= intervals[i].hi) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

}  // namespace ebshrink
