#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ebshrink {

// Standard normal inverse CDF and CDF.
double normal_quantile(double p);
double normal_cdf(double x);

// Log density of N(x | mean, variance).
double normal_log_pdf(double x, double mean, double variance);

struct BrentResult {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evaluations = 0;
};

// Derivative-free bounded scalar minimization (Brent's method). Terminates
// once the bracket width falls below tol_abs.
BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double tol_abs,
                           std::size_t max_iter = 500);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // n-1 denominator; 0 for n < 2
double sample_sd(std::span<const double> xs);

// Mode estimate for a unimodal sample (half-sample mode).
double half_sample_mode(std::vector<double> xs);

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// Runs fn(begin, end) over a partition of [0, n). num_threads == 0 picks the
// hardware concurrency. Chunks never overlap, so writers indexed by position
// need no synchronization.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  unsigned num_threads = 0);

}  // namespace ebshrink
