#include "ebshrink/types.hpp"

#include <cmath>

#include "ebshrink/errors.hpp"

namespace ebshrink {

void UnitData::validate() const {
  if (outcomes.size() != assignments.size()) {
    throw InvalidInput("UnitData: outcomes and assignments differ in length");
  }
  if (outcomes.size() < 2) {
    throw InvalidInput("UnitData: need at least 2 units");
  }
  std::size_t treated = 0, control = 0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int z = assignments[i];
    if (z != 0 && z != 1) {
      throw InvalidInput("UnitData: assignments must be 0 or 1");
    }
    if (!std::isfinite(outcomes[i])) {
      throw InvalidInput("UnitData: outcomes must be finite");
    }
    (z == 1 ? treated : control) += 1;
  }
  if (treated == 0 || control == 0) {
    throw InvalidInput("UnitData: need at least one treated and one control unit");
  }
}

void ExperimentSummary::validate() const {
  if (!std::isfinite(theta_hat)) {
    throw InvalidInput("ExperimentSummary '" + id + "': theta_hat must be finite");
  }
  if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat)) {
    throw InvalidInput("ExperimentSummary '" + id + "': sigma_hat must be > 0");
  }
}

void HyperParameters::validate() const {
  if (!std::isfinite(m0)) throw InvalidInput("HyperParameters: m0 must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("HyperParameters: tau must be > 0");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidInput("HyperParameters: a and b must be > 0");
  }
}

void CuratedObservation::validate() const {
  if (!std::isfinite(eta_hat)) {
    throw InvalidInput("CuratedObservation: eta_hat must be finite");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("CuratedObservation: gamma must be > 0");
  }
}

}  // namespace ebshrink
