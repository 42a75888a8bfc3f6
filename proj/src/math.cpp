#include "ebshrink/math.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <system_error>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "ebshrink/errors.hpp"

namespace ebshrink {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("normal_quantile: p must lie in (0,1)");
  }
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::quantile(unit, p);
}

double normal_cdf(double x) {
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::cdf(unit, x);
}

double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

BrentResult brent_minimize(const std::function<double(double)>& f, double lo,
                           double hi, double tol_abs, std::size_t max_iter) {
  if (!(lo < hi)) throw InvalidInput("brent_minimize: requires lo < hi");
  if (!(tol_abs > 0.0)) throw InvalidInput("brent_minimize: tolerance must be positive");

  constexpr double kGolden = 0.3819660112501051;  // 2 - phi
  double a = lo, b = hi;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double delta = 0.0, delta_prev = 0.0;
  std::size_t evals = 1;

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (b - a < tol_abs) break;
    const double mid = 0.5 * (a + b);

    double trial = 0.0;
    bool parabolic_ok = false;
    if (std::abs(delta_prev) > 0.25 * tol_abs) {
      // Parabola through (v, fv), (w, fw), (x, fx).
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double delta_two_ago = delta_prev;
      delta_prev = delta;
      if (q != 0.0 && std::abs(p) < std::abs(0.5 * q * delta_two_ago) &&
          p > q * (a - x) && p < q * (b - x)) {
        delta = p / q;
        trial = x + delta;
        parabolic_ok = true;
      }
    }
    if (!parabolic_ok) {
      delta_prev = (x >= mid) ? a - x : b - x;
      delta = kGolden * delta_prev;
      trial = x + delta;
    }
    // Keep the trial point a minimal distance away from x.
    const double min_step = 0.25 * tol_abs;
    if (std::abs(trial - x) < min_step) {
      trial = x + (trial >= x ? min_step : -min_step);
    }
    trial = std::clamp(trial, a, b);

    const double ft = f(trial);
    ++evals;
    if (ft <= fx) {
      if (trial >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = trial; fx = ft;
    } else {
      if (trial < x) a = trial; else b = trial;
      if (ft <= fw || w == x) {
        v = w; fv = fw;
        w = trial; fw = ft;
      } else if (ft <= fv || v == x || v == w) {
        v = trial; fv = ft;
      }
    }
  }
  return {x, fx, evals};
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidInput("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - m;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

double sample_sd(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs));
}

double half_sample_mode(std::vector<double> xs) {
  if (xs.empty()) throw InvalidInput("half_sample_mode: empty sample");
  std::sort(xs.begin(), xs.end());
  std::size_t lo = 0, n = xs.size();
  while (n > 3) {
    const std::size_t half = (n + 1) / 2;
    std::size_t best = lo;
    double best_range = xs[lo + half - 1] - xs[lo];
    for (std::size_t i = lo + 1; i + half - 1 < lo + n; ++i) {
      const double range = xs[i + half - 1] - xs[i];
      if (range < best_range) {
        best_range = range;
        best = i;
      }
    }
    lo = best;
    n = half;
  }
  if (n == 3) {
    // Pick the closer pair's midpoint.
    const double d01 = xs[lo + 1] - xs[lo];
    const double d12 = xs[lo + 2] - xs[lo + 1];
    if (d01 < d12) return 0.5 * (xs[lo] + xs[lo + 1]);
    if (d12 < d01) return 0.5 * (xs[lo + 1] + xs[lo + 2]);
    return xs[lo + 1];
  }
  if (n == 2) return 0.5 * (xs[lo] + xs[lo + 1]);
  return xs[lo];
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  unsigned num_threads) {
  if (n == 0) return;
  unsigned workers = num_threads == 0 ? std::thread::hardware_concurrency() : num_threads;
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ebshrink
