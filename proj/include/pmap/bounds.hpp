#pragma once

// Perturb-and-MAP bounds on log Z:
//
//   upper           E[max_x theta(x) + sum_i gamma_i(x_i)]               >= log Z
//   lower-expected  E[max_x theta(x) + (1/|A|) sum_a gamma_a(x_a)]        <= log Z
//   lower-probable  max over a replicated model with averaged unary noise,
//                   <= log Z + eps*n with high probability.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmap/bound_estimate.hpp"
#include "pmap/exact.hpp"
#include "pmap/map_solvers.hpp"
#include "pmap/model.hpp"
#include "pmap/rng.hpp"

namespace pmap {

/// Mean over M draws of the UNARY-perturbed MAP value; draw k uses
/// seed.child(k).
BoundEstimate upper_bound(const PairwiseModel& model, std::uint64_t mc_samples,
                          const SeedPath& seed,
                          SolverKind solver = SolverKind::AUTO,
                          unsigned workers = 1);

/// {{0}, {1}, ..., {n-1}}.
std::vector<std::vector<int>> singleton_subsets(const PairwiseModel& model);

/// Mean over M draws of max_x theta(x) + (1/|A|) sum_a gamma_a(x_a), with an
/// independent Gumbel per subset and joint subset label. Subsets of size one
/// or two are folded into the model and solved with `solver`; larger
/// subsets fall back to enumeration (bounded by cap).
BoundEstimate lower_bound_expected(const PairwiseModel& model,
                                   const std::vector<std::vector<int>>& subsets,
                                   std::uint64_t mc_samples,
                                   const SeedPath& seed,
                                   SolverKind solver = SolverKind::AUTO,
                                   std::uint64_t cap = kDefaultStateCap,
                                   unsigned workers = 1);

/// m_i copies of every vertex with unary theta_i / m_i, and a coupling
/// theta_ij / (m_i m_j) between every pair of copies across each edge.
struct ReplicaExpansion {
  PairwiseModel model;
  std::vector<std::vector<int>> copies;  // original vertex -> copy ids
  std::vector<int> origin;
  std::vector<double> vertex_weight;  // 1 / m_i per copy
};

ReplicaExpansion expand_replicas(const PairwiseModel& model,
                                 std::span<const int> replicas,
                                 std::size_t max_edges = std::size_t{1} << 22);

/// Single MAP value of the replica expansion with one independent unary
/// Gumbel per copy entry, weighted 1/m_i. epsilon_slack is reported as 0.
BoundEstimate lower_bound_probable(const PairwiseModel& model,
                                   std::span<const int> replicas,
                                   const SeedPath& seed,
                                   SolverKind solver = SolverKind::AUTO,
                                   std::size_t max_edges = std::size_t{1} << 22);

/// Same replica count for every vertex.
BoundEstimate lower_bound_probable(const PairwiseModel& model, int replicas,
                                   const SeedPath& seed,
                                   SolverKind solver = SolverKind::AUTO);

/// 1 - sum_i pi^2 |dom(theta)| / (6 m_i eps^2): the stated confidence of the
/// probable bound at slack eps*n (often vacuous, i.e. negative).
double probable_bound_confidence(const PairwiseModel& model,
                                 std::span<const int> replicas, double eps);

struct BoundsSelection {
  bool upper = true;
  bool lower_expected = true;
  bool lower_probable = true;
};

struct BoundsReportConfig {
  int rows = 3;
  int cols = 3;
  double field_range = 1.0;
  std::vector<double> couplings{0.5, 1.0, 2.0, 3.0};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t mc_samples = 1000;
  int replicas = 50;
  std::uint64_t root_seed = 0;
  SolverKind solver = SolverKind::AUTO;
  BoundsSelection which;
  bool exact = true;  // compute the oracle log Z column
  std::uint64_t cap = kDefaultStateCap;
  unsigned workers = 1;
};

struct BoundsRow {
  double coupling = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> exact_logz;
  std::optional<BoundEstimate> upper;
  std::optional<BoundEstimate> lower_expected;
  std::optional<BoundEstimate> lower_probable;
  /// min(1, exp(lower_probable - upper)); an estimate of the acceptance
  /// probability Z / exp(U_0) of the unbiased sampler.
  std::optional<double> accept_proxy;
};

/// Bounds for the model in one cell; MC streams derive from `seed`.
BoundsRow compute_bounds(const PairwiseModel& model, const BoundsReportConfig& cfg,
                         const SeedPath& seed);

/// One row per (coupling, seed) cell over generated spin glasses. Cell
/// (ci, s) uses model seed s and noise root root_seed/ci/s.
std::vector<BoundsRow> bounds_report(const BoundsReportConfig& cfg);

inline constexpr const char* kBoundsCsvHeader =
    "c,seed,exact_logz,upper,upper_se,lower_exp,lower_exp_se,lower_prob,accept_proxy";

std::string bounds_csv(const std::vector<BoundsRow>& rows);

/// Fixed-precision number formatting shared by every CSV writer ("NA" for
/// missing values).
std::string format_number(std::optional<double> v);

}  // namespace pmap
