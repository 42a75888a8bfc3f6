#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebshrink/diagnostics.hpp"
#include "ebshrink/simlab.hpp"
#include "ebshrink/types.hpp"

namespace ebshrink {

// Experiment CSV: header `id,theta_hat,sigma_hat,selected`; the selected
// column is optional (and may be empty per row). Parsing is strict: exact
// header, exact field counts, fully-consumed numerics, sigma_hat > 0.
// Errors name the offending 1-based line.
std::vector<ExperimentSummary> parse_experiments(const std::filesystem::path& path);
void write_experiments(std::ostream& out, std::span<const ExperimentSummary> exps);
void write_experiments(const std::filesystem::path& path,
                       std::span<const ExperimentSummary> exps);

// Curated CSV: header `id,eta_hat,gamma`.
std::vector<CuratedObservation> parse_curated(const std::filesystem::path& path);

// Replication-pair CSV: header
// `id,theta_hat,sigma_hat,rep_theta_hat,rep_sigma_hat`.
std::vector<ReplicationPair> parse_pairs(const std::filesystem::path& path);

// Per-experiment posterior table, the `adjust` output and `aggregate` input.
// Columns: id,estimator,mean,variance,lambda_used,interval_lo,interval_hi.
// lambda_used is empty for face_value rows.
struct PosteriorRow {
  std::string id;
  Estimator estimator = Estimator::kFaceValue;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> lambda_used;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

extern const char* const kPosteriorTableHeader;

void write_posterior_table(std::ostream& out, std::span<const PosteriorRow> rows);
std::vector<PosteriorRow> parse_posterior_table(const std::filesystem::path& path);

// Metrics and sweep tables (simulate / sweep outputs).
void write_metrics_table(std::ostream& out, std::span<const MetricsReport> reports);
void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace ebshrink
