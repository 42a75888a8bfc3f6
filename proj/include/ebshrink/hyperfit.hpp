#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ebshrink/types.hpp"

namespace ebshrink {

// Marginal log-likelihood of the curated collection at a candidate tau:
//   sum_k log N(eta_hat_k | 0, tau + gamma_k).
double curated_log_likelihood(std::span<const CuratedObservation> obs,
                              double tau);

// Maximizes the marginal likelihood over tau in [0, tau_max] by bounded
// one-dimensional search. tau_max defaults to 10 * max(eta_hat^2) + 1; the
// search stops once the bracket width drops below 1e-10 * (1 + tau_max).
// The boundary tau* = 0 is a legitimate result (all-null collections) and is
// returned exactly.
double fit_tau(std::span<const CuratedObservation> obs,
               std::optional<double> tau_max = std::nullopt);

// Full conditional of the local shrinkage factor:
//   lambda | theta ~ InverseGamma((a+1)/2, ((theta - m0)^2 + b*tau) / (2*tau)).
InverseGammaParams lambda_conditional(double theta,
                                      const HyperParameters& hyper);

// Conditional posterior mode under a = b = 1:
//   lambda* = ((theta_hat - m0)^2 + tau*) / (4 tau*),  always >= 1/4.
double lambda_mode(double theta_hat, double tau_star, double m0);

struct GibbsSummary {
  double lambda_mean = 0.0;
  double lambda_mode_estimate = 0.0;
  double theta_mean = 0.0;
  double theta_variance = 0.0;
  std::size_t n_kept = 0;
};

// Sampling oracle for the general-(a, b) model: alternates theta | lambda
// (Gaussian) and lambda | theta (Inverse-Gamma) draws with tau fixed.
// Initialized at lambda = 1, theta = theta_hat. burn_in defaults to 10% of
// iterations. Deterministic given seed.
GibbsSummary gibbs_lambda_oracle(const ExperimentSummary& exp,
                                 const HyperParameters& hyper,
                                 std::size_t iterations,
                                 std::optional<std::size_t> burn_in,
                                 std::uint64_t seed);

}  // namespace ebshrink
