#include "ebshrink/hyperfit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ebshrink/errors.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/rng.hpp"

namespace ebshrink {

double curated_log_likelihood(std::span<const CuratedObservation> obs,
                              double tau) {
  double ll = 0.0;
  for (const CuratedObservation& o : obs) {
    ll += normal_log_pdf(o.eta_hat, 0.0, tau + o.gamma);
  }
  return ll;
}

double fit_tau(std::span<const CuratedObservation> obs,
               std::optional<double> tau_max) {
  if (obs.empty()) throw InvalidInput("fit_tau: empty observation list");
  double max_eta_sq = 0.0;
  for (const CuratedObservation& o : obs) {
    o.validate();
    max_eta_sq = std::max(max_eta_sq, o.eta_hat * o.eta_hat);
  }
  const double upper = tau_max.value_or(10.0 * max_eta_sq + 1.0);
  if (!(upper > 0.0) || !std::isfinite(upper)) {
    throw InvalidInput("fit_tau: tau_max must be > 0");
  }

  const auto neg_ll = [&](double tau) { return -curated_log_likelihood(obs, tau); };
  const double tol = 1e-10 * (1.0 + upper);
  const BrentResult interior = brent_minimize(neg_ll, 0.0, upper, tol);

  // The maximizer may sit on a boundary; certify against both endpoints.
  double best_tau = interior.x;
  double best_neg = interior.fx;
  for (double candidate : {0.0, upper}) {
    const double f = neg_ll(candidate);
    if (f <= best_neg) {
      best_neg = f;
      best_tau = candidate;
    }
  }
  return best_tau;
}

InverseGammaParams lambda_conditional(double theta,
                                      const HyperParameters& hyper) {
  hyper.validate();
  if (!std::isfinite(theta)) {
    throw InvalidInput("lambda_conditional: theta must be finite");
  }
  const double d = theta - hyper.m0;
  InverseGammaParams params;
  params.shape = (hyper.a + 1.0) / 2.0;
  params.scale = (d * d + hyper.b * hyper.tau) / (2.0 * hyper.tau);
  return params;
}

double lambda_mode(double theta_hat, double tau_star, double m0) {
  if (!(tau_star > 0.0) || !std::isfinite(tau_star)) {
    throw InvalidInput("lambda_mode: tau_star must be > 0");
  }
  const double d = theta_hat - m0;
  return (d * d + tau_star) / (4.0 * tau_star);
}

GibbsSummary gibbs_lambda_oracle(const ExperimentSummary& exp,
                                 const HyperParameters& hyper,
                                 std::size_t iterations,
                                 std::optional<std::size_t> burn_in,
                                 std::uint64_t seed) {
  exp.validate();
  hyper.validate();
  if (iterations == 0) {
    throw InvalidInput("gibbs_lambda_oracle: iterations must be positive");
  }
  const std::size_t burn = burn_in.value_or(iterations / 10);
  if (burn >= iterations) {
    throw InvalidInput("gibbs_lambda_oracle: burn_in must be < iterations");
  }

  SubstreamRng rng(seed, 0, Draw::kGibbsChain);
  const double s2 = exp.sigma_hat * exp.sigma_hat;

  double lambda = 1.0;  // start at the global-shrinkage special case
  const std::size_t kept = iterations - burn;
  std::vector<double> lambdas;
  lambdas.reserve(kept);
  double theta_sum = 0.0, theta_sq_sum = 0.0, lambda_sum = 0.0;

  for (std::size_t t = 0; t < iterations; ++t) {
    const double prior_var = lambda * hyper.tau;
    const double w = s2 / (s2 + prior_var);
    const double post_mean = w * hyper.m0 + (1.0 - w) * exp.theta_hat;
    const double post_var = 1.0 / (1.0 / s2 + 1.0 / prior_var);
    const double theta = rng.normal(post_mean, std::sqrt(post_var));

    const InverseGammaParams cond = lambda_conditional(theta, hyper);
    lambda = rng.inverse_gamma(cond.shape, cond.scale);

    if (t >= burn) {
      lambdas.push_back(lambda);
      lambda_sum += lambda;
      theta_sum += theta;
      theta_sq_sum += theta * theta;
    }
  }

  GibbsSummary out;
  out.n_kept = kept;
  const double n = static_cast<double>(kept);
  out.lambda_mean = lambda_sum / n;
  out.theta_mean = theta_sum / n;
  out.theta_variance =
      kept > 1 ? (theta_sq_sum - n * out.theta_mean * out.theta_mean) / (n - 1.0)
               : 0.0;
  out.lambda_mode_estimate = half_sample_mode(std::move(lambdas));
  return out;
}

}  // namespace ebshrink
