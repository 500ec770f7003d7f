#pragma once

namespace precaution {

/// Two tolerance classes are used throughout: exact structural identities
/// (sums of the same numbers in a different order) and probabilistic
/// normalization / verdict thresholds.
struct Tolerances {
  double structural = 1e-12;
  double normalization = 1e-9;
  double verdict = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace precaution
