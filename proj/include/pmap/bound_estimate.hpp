#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pmap/rng.hpp"

namespace pmap {

enum class BoundKind { UPPER, LOWER_EXPECTED, LOWER_PROBABLE, EXACT, POINT };

const char* to_string(BoundKind k);

/// A bound on, or estimate of, log Z.
struct BoundEstimate {
  double value = 0.0;
  BoundKind kind = BoundKind::POINT;
  std::uint64_t samples = 0;
  /// Empirical standard error; present for Monte Carlo kinds.
  std::optional<double> std_error;
  /// Closed-form spread of the estimator when one is known.
  std::optional<double> analytic_std_error;
  /// The eps*n slack of the probable bound; reported, never subtracted.
  std::optional<double> epsilon_slack;
  /// Chebyshev tail probability at `epsilon`, where applicable.
  std::optional<double> epsilon;
  std::optional<double> tail_probability;
  SeedPath seed;
};

/// pi^2 / (6 m eps^2): Chebyshev bound on P[|mean of m maxima - log Z| >= eps].
double chebyshev_tail(std::uint64_t m, double eps);

}  // namespace pmap
