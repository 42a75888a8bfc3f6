#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebshrink/types.hpp"

namespace ebshrink {

// Effect-generating families of the simulation laboratory.
enum class Family { kCorrectPrior, kMisspecifiedMean, kHeavyTail, kHiddenSelection };

enum class Estimator { kFaceValue, kGlobal, kHybrid };

enum class SweepAxis { kSigma, kMu, kNu, kRho };

std::string to_string(Family family);
std::string to_string(Estimator estimator);
std::string to_string(SweepAxis axis);
Family family_from_string(const std::string& name);
Estimator estimator_from_string(const std::string& name);
SweepAxis axis_from_string(const std::string& name);

// Full description of one simulation scenario. N(.,.) second arguments are
// variances; kappa is the standard deviation of the noise on sigma_hat.
struct ScenarioConfig {
  Family family = Family::kCorrectPrior;
  std::size_t n_experiments = 0;
  std::vector<double> mu{0.0};  // two entries for hidden_selection
  double epsilon = 1.0;         // generator variance of the true effects
  double sigma = 1.0;           // nominal sampling standard deviation
  double kappa = 0.0;           // sd of the noise on sigma_hat
  std::optional<double> nu;     // heavy_tail only, > 0
  std::optional<double> rho;    // hidden_selection only, |rho| < 1
  double analysis_m0 = 0.0;
  double analysis_tau = 1.0;
  double selection_multiplier = 1.96;
  double interval_level = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

// One simulated experiment: the truth, its face-value summary, and the
// selection decision. companion_theta_hat carries the non-target dimension
// under hidden selection.
struct SimRecord {
  double theta_true = 0.0;
  double theta_hat = 0.0;
  double sigma_hat = 0.0;
  bool selected = false;
  std::optional<double> companion_theta_hat;
};

struct MetricsReport {
  Estimator estimator = Estimator::kFaceValue;
  double mse = 0.0;
  double bias = 0.0;
  double coverage = 0.0;
  std::size_t n_selected = 0;
  double selection_rate = 0.0;
};

// Point estimate plus central interval; the common shape of the three
// estimation strategies compared in the lab.
struct IntervalEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct EstimateTriple {
  IntervalEstimate face_value;
  PosteriorSummary global_shrink;
  PosteriorSummary hybrid;
};

// One strict-threshold selection decision: theta_hat > multiplier * sigma_hat.
bool apply_selection(double theta_hat, double sigma_hat, double multiplier);

// Draws n_experiments records. Every record derives its own random
// substreams from (seed, index, role), so the output is bit-identical for
// any parallelism degree.
std::vector<SimRecord> generate_scenario(const ScenarioConfig& cfg,
                                         unsigned num_threads = 0);

// Applies the face-value, global, and hybrid strategies to each record,
// using the scenario's analysis prior. Under hidden selection only the
// target dimension is analyzed.
std::vector<EstimateTriple> run_estimators(std::span<const SimRecord> records,
                                           const ScenarioConfig& cfg,
                                           unsigned num_threads = 0);

// MSE, bias, coverage, and selection counts per estimator, over the selected
// subset when selected_only. Returns nullopt when the requested subset is
// empty (absent metrics, not zeros).
std::optional<std::vector<MetricsReport>> compute_metrics(
    std::span<const SimRecord> records, std::span<const EstimateTriple> triples,
    bool selected_only);

struct SweepRow {
  SweepAxis axis = SweepAxis::kSigma;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

// One simulation per (grid value, seed); rows ordered grid-major, then seed,
// then estimator (face_value, global, hybrid). Throws ConfigError for
// axis/family mismatches and AbsentMetrics if a grid point selects nothing.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, SweepAxis axis,
                                std::span<const double> grid,
                                std::span<const std::uint64_t> seeds,
                                bool selected_only = true,
                                unsigned num_threads = 0);

}  // namespace ebshrink
