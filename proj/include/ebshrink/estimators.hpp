#pragma once

#include <span>
#include <string>

#include "ebshrink/types.hpp"

namespace ebshrink {

// Which closed-form shrinkage rule a gap refers to.
enum class GapMode { kHybrid, kGlobal };

// Ratio-of-means treatment effect with a delta-method standard error.
// The returned summary is not validated: degenerate data (e.g. constant
// outcomes) legitimately produce sigma_hat == 0, which downstream shrinkage
// rejects explicitly.
ExperimentSummary face_value_estimate(const UnitData& data,
                                      Convention convention,
                                      std::string id = {});

// Normal-normal update with effective prior variance lambda * tau:
//   mean = w*m0 + (1-w)*theta_hat,  w = sigma^2 / (sigma^2 + lambda*tau)
//   variance = (1/sigma^2 + 1/(lambda*tau))^-1
// plus a central credible interval at the requested level.
PosteriorSummary shrinkage_posterior(const ExperimentSummary& exp,
                                     const HyperParameters& hyper,
                                     double lambda, double level);

// shrinkage_posterior with lambda fixed at 1.
PosteriorSummary global_posterior(const ExperimentSummary& exp,
                                  const HyperParameters& hyper, double level);

// shrinkage_posterior with lambda fixed at its closed-form conditional mode
//   lambda* = ((theta_hat - m0)^2 + tau) / (4 tau),
// valid for a = b = 1 only.
PosteriorSummary hybrid_posterior(const ExperimentSummary& exp,
                                  const HyperParameters& hyper, double level);

// |posterior mean - theta_hat| of the corresponding m0 = 0 estimator:
//   hybrid: 4 sigma^2 |theta| / (theta^2 + tau + 4 sigma^2)   (redescending)
//   global: |theta| sigma^2 / (tau + sigma^2)                 (unbounded)
double shrinkage_gap(double theta_hat, double sigma_sq, double tau_star,
                     GapMode mode);

// Posterior over the sum of effects: means and variances add.
AggregateEstimate aggregate(std::span<const PosteriorSummary> posteriors,
                            double level);

}  // namespace ebshrink
