#include "ebshrink/rng.hpp"

#include "ebshrink/errors.hpp"

namespace ebshrink {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index,
                             std::uint64_t role) {
  return mix64(mix64(mix64(seed) ^ index) ^ (role * 0xd1342543de82ef95ULL));
}

SubstreamRng::SubstreamRng(std::uint64_t seed) : engine_(mix64(seed)) {}

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t index, Draw role)
    : engine_(substream_seed(seed, index, static_cast<std::uint64_t>(role))) {}

double SubstreamRng::normal(double mean, double sd) {
  if (sd < 0.0) throw InvalidInput("normal: sd must be non-negative");
  if (sd == 0.0) return mean;
  std::normal_distribution<double> dist(mean, sd);
  return dist(engine_);
}

double SubstreamRng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double SubstreamRng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InvalidInput("gamma: shape and scale must be positive");
  }
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double SubstreamRng::inverse_gamma(double shape, double scale) {
  // X ~ Gamma(shape, 1/scale)  =>  1/X ~ InverseGamma(shape, scale).
  return 1.0 / gamma(shape, 1.0 / scale);
}

double SubstreamRng::student_t(double dof) {
  if (!(dof > 0.0)) throw InvalidInput("student_t: dof must be positive");
  std::student_t_distribution<double> dist(dof);
  return dist(engine_);
}

std::uint64_t SubstreamRng::next_u64() { return engine_(); }

}  // namespace ebshrink
