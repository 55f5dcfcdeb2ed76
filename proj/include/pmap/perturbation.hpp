#pragma once

// Zero-mean Gumbel noise, F(t) = exp(-exp(-(t + c))) with c the
// Euler-Mascheroni constant, and its attachment to model potentials.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pmap/exact.hpp"
#include "pmap/model.hpp"
#include "pmap/rng.hpp"

namespace pmap {

inline constexpr double kEulerGamma = 0.5772156649015329;

/// Standard deviation of a zero-mean Gumbel variable, pi / sqrt(6).
inline constexpr double kGumbelStdDev = 1.2825498301618641;

enum class Scheme { FULL, UNARY, PAIRWISE };

const char* to_string(Scheme s);

/// Inverse CDF: -ln(-ln(u)) - c.
inline double gumbel_from_uniform(double u);

double sample_gumbel(Rng& rng);

/// Adds an independent Gumbel to every finite unary entry, vertex by vertex.
PairwiseModel perturb_unary(const PairwiseModel& model, Rng& rng);

/// Unary entries as in perturb_unary, then every finite pairwise entry,
/// edge by edge.
PairwiseModel perturb_pairwise(const PairwiseModel& model, Rng& rng);

/// Perturbation with per-vertex and per-edge weights: each finite entry of a
/// table with weight w receives w * gamma. An empty edge_weight span means
/// no pairwise noise.
PairwiseModel perturb_weighted(const PairwiseModel& model,
                               std::span<const double> vertex_weight,
                               std::span<const double> edge_weight, Rng& rng);

/// theta(x) + gamma(x) for every configuration (one draw per index).
std::vector<double> perturb_full(const PairwiseModel& model, Rng& rng,
                                 std::uint64_t cap = kDefaultStateCap);

PairwiseModel perturb(const PairwiseModel& model, Scheme scheme, Rng& rng);

// ---------------------------------------------------------------------------

inline double gumbel_from_uniform(double u) {
  return -std::log(-std::log(u)) - kEulerGamma;
}

}  // namespace pmap
