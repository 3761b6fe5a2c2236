#pragma once

#include <string>
#include <vector>

#include "nstorus/config.hpp"
#include "nstorus/explorer.hpp"

namespace nstorus {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0;  ///< measured quantity
  double limit = 0;  ///< pass iff value <= limit
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  Json to_json() const;
};

/// Invariant suite on the configured grid: exact-solution regressions,
/// energy identity, Poincare, divergence, heat decay and the semigroup law.
/// The horizon is capped at 1.
VerifyReport run_verify(const ExperimentConfig& cfg);

}  // namespace nstorus
