#pragma once

#include <cstdint>
#include <random>

namespace ebshrink {

// splitmix64 finalizer; good avalanche for deriving substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent seed for the substream identified by
// (seed, index, role).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index,
                             std::uint64_t role);

// Tags that keep draws of different quantities on disjoint substreams, so a
// record's theta stream is unaffected by how many sigma draws happened.
enum class Draw : std::uint64_t {
  kThetaTrue = 1,
  kSigmaHat = 2,
  kThetaHat = 3,
  kCompanion = 4,
  kReplicateTheta = 5,
  kReplicateObs = 6,
  kGibbsChain = 7,
};

// A self-contained random stream. Simulation code creates one per
// (record, draw role) so parallel generation is order-independent.
class SubstreamRng {
 public:
  explicit SubstreamRng(std::uint64_t seed);
  SubstreamRng(std::uint64_t seed, std::uint64_t index, Draw role);

  double normal(double mean, double sd);
  double uniform(double lo, double hi);
  double gamma(double shape, double scale);
  double inverse_gamma(double shape, double scale);
  double student_t(double dof);
  std::uint64_t next_u64();

 private:
  std::mt19937_64 engine_;
};

}  // namespace ebshrink
