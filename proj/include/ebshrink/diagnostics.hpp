#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ebshrink/simlab.hpp"
#include "ebshrink/types.hpp"

namespace ebshrink {

// The same treatment re-tested on a fresh sample; the replication acts as a
// ground-truth proxy.
struct ReplicationPair {
  ExperimentSummary original;
  ExperimentSummary replication;
};

struct CheckReport {
  std::string statistic_name;
  double observed = 0.0;
  double tail_area_p = 0.0;
  std::size_t n_replicates = 0;
};

enum class CheckStatistic { kMean, kMax, kSd, kCustom };

// replicates[r][e] is the simulated theta_hat of experiment e in replicate r.
using ReplicateMatrix = std::vector<std::vector<double>>;

// For each replicate and experiment: draw theta from the fitted posterior
// (global or hybrid), then theta_hat_rep ~ N(theta, sigma_hat^2).
// Deterministic given seed; replicate generation is parallel across the
// replicate index.
ReplicateMatrix posterior_predictive_replicate(
    std::span<const ExperimentSummary> exps, const HyperParameters& hyper,
    Estimator estimator, std::size_t n_replicates, std::uint64_t seed,
    unsigned num_threads = 0);

using CollectionStatistic = std::function<double(std::span<const double>)>;

// Tail area p = fraction of replicates with T(replicate) >= T(observed);
// ties count toward the tail.
CheckReport tail_area_probability(std::span<const ExperimentSummary> observed,
                                  const ReplicateMatrix& replicates,
                                  CheckStatistic statistic,
                                  const CollectionStatistic& custom = {},
                                  const std::string& custom_name = "custom");

struct ReplicationMae {
  double face_value = 0.0;
  double global_shrink = 0.0;
  double hybrid = 0.0;
  std::size_t n_pairs = 0;
};

// Mean absolute error of each estimate of the original experiment against
// the replication's face-value result.
ReplicationMae evaluate_replication_pairs(std::span<const ReplicationPair> pairs,
                                          const HyperParameters& hyper);

// Coverage expressed as a comparison statistic: the fraction of intervals
// containing the paired truth. Matches simlab's coverage metric exactly on
// identical inputs.
double interval_hit_fraction(std::span<const double> truths,
                             std::span<const IntervalEstimate> intervals);

}  // namespace ebshrink
