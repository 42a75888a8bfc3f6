#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ebshrink {

// How a relative effect is stored: the raw treated/control ratio, or the
// ratio minus one (centered at zero, the scale the zero prior mean targets).
enum class Convention { kRatio, kRatioMinusOne };

// Unit-level data for one experiment: a business-metric outcome and a 0/1
// treatment assignment per randomization unit.
struct UnitData {
  std::vector<double> outcomes;
  std::vector<int> assignments;

  void validate() const;
};

// Sufficient statistics for one experiment.
struct ExperimentSummary {
  std::string id;
  double theta_hat = 0.0;
  double sigma_hat = 0.0;  // standard error of theta_hat, > 0
  std::optional<bool> selected;

  void validate() const;
};

// Shrinkage prior configuration: prior mean m0, global variance tau, and the
// Inverse-Gamma hyperparameters (a, b) of the local shrinkage factor.
struct HyperParameters {
  double m0 = 0.0;
  double tau = 1.0;
  double a = 1.0;
  double b = 1.0;

  void validate() const;
};

// Gaussian posterior for one experiment, the local shrinkage factor that
// produced it, and a central credible interval.
struct PosteriorSummary {
  double mean = 0.0;
  double variance = 0.0;
  double lambda_used = 1.0;
  double interval_level = 0.9;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

// Posterior over a sum of experiment effects.
struct AggregateEstimate {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n_experiments = 0;
  double interval_level = 0.9;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

// One historical effect estimate with known sampling variance, used to fit
// the global prior variance.
struct CuratedObservation {
  double eta_hat = 0.0;
  double gamma = 0.0;  // known sampling variance, > 0

  void validate() const;
};

struct InverseGammaParams {
  double shape = 0.0;
  double scale = 0.0;
};

}  // namespace ebshrink
