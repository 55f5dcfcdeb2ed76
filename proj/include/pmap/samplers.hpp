#pragma once

// Perturb-and-MAP samplers:
//  - exact Gumbel-max sampling with one perturbation per configuration,
//  - approximate sampling from low-dimensional perturbations, optionally on
//    a replicated ("expanded") tree,
//  - unbiased sequential rejection sampling driven by a self-reducible
//    family of upper bounds on the partial log-partition functions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pmap/bound_estimate.hpp"
#include "pmap/exact.hpp"
#include "pmap/map_solvers.hpp"
#include "pmap/model.hpp"
#include "pmap/perturbation.hpp"
#include "pmap/rng.hpp"

namespace pmap {

enum class SamplerKind {
  GUMBEL_FULL,
  APPROX_UNARY,
  APPROX_PAIRWISE,
  UNBIASED,
  GIBBS,
  METROPOLIS,
  EXACT
};

const char* to_string(SamplerKind k);

struct SampleBatch {
  std::vector<Assignment> samples;
  SamplerKind sampler = SamplerKind::EXACT;
  SeedPath seed;
  std::uint64_t restarts = 0;          // unbiased sampler only
  std::uint64_t slack_violations = 0;  // unbiased sampler only
  bool heuristic = false;              // approximation without guarantee
  double wall_time = 0.0;              // seconds
};

// --- exact Gumbel-max -------------------------------------------------------

/// Caches theta over all configurations; each draw perturbs every entry.
class GumbelMaxSampler {
 public:
  explicit GumbelMaxSampler(const PairwiseModel& model,
                            std::uint64_t cap = kDefaultStateCap);

  Assignment operator()(Rng& rng) const;

  /// max_x theta(x) + gamma(x) for one fresh perturbation.
  double perturbed_max(Rng& rng) const;

 private:
  std::vector<int> domains_;
  std::vector<double> energies_;
};

Assignment gumbel_max_sample(const PairwiseModel& model, Rng& rng,
                             std::uint64_t cap = kDefaultStateCap);

/// Mean of m independent full-perturbation maxima (replicate k uses
/// seed.child(k)). Reports the empirical standard error, the exact
/// pi/sqrt(6m), and the Chebyshev tail at `epsilon`.
BoundEstimate estimate_logz_full(const PairwiseModel& model, std::uint64_t m,
                                 const SeedPath& seed, double epsilon = 0.1,
                                 std::uint64_t cap = kDefaultStateCap,
                                 unsigned workers = 1);

// --- approximate low-dimensional sampling -----------------------------------

/// Argmax of a single UNARY or PAIRWISE perturbed MAP problem.
Assignment approx_map_sample(const PairwiseModel& model, Scheme scheme,
                             SolverKind solver, Rng& rng);

/// draws samples; draw k uses seed.child(k).
SampleBatch approx_map_batch(const PairwiseModel& model, Scheme scheme,
                             SolverKind solver, std::uint64_t draws,
                             const SeedPath& seed, unsigned workers = 1);

/// A forest whose subtrees hanging off an anchor edge are replicated.
struct ExpandedModel {
  PairwiseModel model;  // tables already scaled by their weights
  std::vector<std::vector<int>> copy_map;  // original vertex -> copies
  std::vector<int> origin;                 // copy vertex -> original
  std::vector<int> edge_origin;            // copy edge -> original edge
  std::vector<double> vertex_weight;
  std::vector<double> edge_weight;
  Edge anchor;  // original ids; each has exactly one copy

  /// Replica-constant lift of an original assignment.
  Assignment lift(std::span<const Label> x) const;
  /// Original-space assignment taking each vertex from its first copy.
  Assignment project(std::span<const Label> x) const;
};

/// Orients the anchor's tree away from (r,s) and replicates each child
/// subtree m times, recursively; a copy at replication depth d carries
/// weight m^-d on its unary and parent-edge tables. Vertices outside the
/// anchor's component are kept with weight 1.
ExpandedModel expand_tree(const PairwiseModel& model, Edge anchor, int m,
                          std::size_t max_vertices = std::size_t{1} << 22);

/// Perturbs an expanded model: every copy table receives weight * gamma.
/// UNARY perturbs vertex tables only; PAIRWISE vertex and edge tables.
PairwiseModel perturb_expanded(const ExpandedModel& expanded, Scheme scheme,
                               Rng& rng);

struct PairMarginalEstimate {
  MarginalTable table;  // over the anchor (r, s)
  bool heuristic = false;
  std::uint64_t draws = 0;
  int replicas = 1;
};

/// Empirical distribution of the anchor labels over `draws` perturbed MAP
/// solves. Forests are expanded and solved by max-product; any other model
/// is solved unexpanded and the result is flagged heuristic.
PairMarginalEstimate approx_pair_marginal(const PairwiseModel& model,
                                          Edge anchor, int m,
                                          std::uint64_t draws,
                                          const SeedPath& seed,
                                          Scheme scheme = Scheme::PAIRWISE,
                                          unsigned workers = 1);

// --- self-reducible upper bounds and unbiased sampling ----------------------

enum class FamilyKind { EXACT_LSE, GUMBEL_MC };

const char* to_string(FamilyKind k);

struct FamilyValue {
  double value = kNegInf;
  double std_error = 0.0;
};

/// U_j(x_1..x_j) for j = 0..n over a fixed vertex ordering.
///
/// EXACT_LSE: the conditional log-partition log sum_{x_{j+1..n}} exp theta.
/// GUMBEL_MC: mean over M draws of max over the free variables of
/// theta + sum_{free i} gamma_i(x_i), prefix clamped. Values are cached per
/// prefix; U_n(x) = theta(x) with zero error for both kinds.
class UpperBoundFamily {
 public:
  UpperBoundFamily(PairwiseModel model, std::vector<int> order, FamilyKind kind,
                   std::uint64_t mc_samples, SeedPath seed,
                   SolverKind solver = SolverKind::AUTO,
                   std::uint64_t cap = kDefaultStateCap, unsigned workers = 1);

  /// prefix[k] is the label of order()[k].
  FamilyValue evaluate(std::span<const Label> prefix);
  double operator()(std::span<const Label> prefix) {
    return evaluate(prefix).value;
  }

  int size() const { return model_.num_vertices(); }
  const std::vector<int>& order() const { return order_; }
  const PairwiseModel& model() const { return model_; }
  FamilyKind kind() const { return kind_; }
  std::uint64_t mc_samples() const { return mc_samples_; }
  std::size_t cached() const { return cache_.size(); }

  /// Slack allowed on the log of an Algorithm-1 step sum before it counts
  /// as an error: 1e-9 for EXACT_LSE; for GUMBEL_MC six combined standard
  /// errors of the parent and the noisiest child value.
  double step_tolerance(double parent_se, double max_child_se) const;

 private:
  FamilyValue compute(std::span<const Label> prefix) const;

  PairwiseModel model_;
  std::vector<int> order_;
  FamilyKind kind_;
  std::uint64_t mc_samples_;
  SeedPath seed_;
  SolverKind solver_;
  std::uint64_t cap_;
  unsigned workers_;
  std::map<std::vector<Label>, FamilyValue> cache_;
};

/// Empty order means vertex-id (row-major) order.
UpperBoundFamily make_bound_family(const PairwiseModel& model,
                                   std::vector<int> order, FamilyKind kind,
                                   std::uint64_t mc_samples,
                                   const SeedPath& seed,
                                   SolverKind solver = SolverKind::AUTO,
                                   std::uint64_t cap = kDefaultStateCap,
                                   unsigned workers = 1);

struct AttemptResult {
  bool accepted = false;
  Assignment x;  // original vertex ids; partial when rejected
  /// log of the product of the step probabilities taken.
  double log_path_probability = 0.0;
  std::uint64_t slack_violations = 0;
};

/// One pass of the sequential procedure: at step j draw x_j with
/// p_j(x_j) = exp(U_j - U_{j-1}) or reject with 1 - sum p_j.
/// A step whose sum exceeds one is renormalized and, beyond rounding, counted
/// as a slack violation. When the log of the sum (or of one entry) exceeds
/// `tolerance` (default: UpperBoundFamily::step_tolerance) NumericalError is
/// thrown.
AttemptResult unbiased_attempt(UpperBoundFamily& family, Rng& rng,
                               std::optional<double> tolerance = std::nullopt);

/// The acceptance behaviour of Algorithm 1 for a fixed (already realized)
/// family, by walking every prefix: probability of accepting, and
/// joint[k] = P(accept and output the configuration with assignment_index k).
struct FamilyAcceptance {
  double probability = 0.0;
  std::vector<double> joint;
  std::uint64_t slack_violations = 0;  // prefixes renormalized
};

FamilyAcceptance exact_acceptance(UpperBoundFamily& family,
                                  std::uint64_t cap = kDefaultStateCap,
                                  std::optional<double> tolerance = std::nullopt);

struct UnbiasedResult {
  Assignment x;
  std::uint64_t restarts = 0;
  std::uint64_t slack_violations = 0;
  double log_path_probability = 0.0;
};

/// Repeats unbiased_attempt until acceptance; throws RestartsExhausted after
/// max_restarts rejections.
UnbiasedResult unbiased_sample(UpperBoundFamily& family, Rng& rng,
                               std::uint64_t max_restarts = 1'000'000,
                               std::optional<double> tolerance = std::nullopt);

SampleBatch unbiased_batch(UpperBoundFamily& family, std::uint64_t draws,
                           const SeedPath& seed,
                           std::uint64_t max_restarts = 1'000'000);

struct AcceptanceEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // Wilson interval at z = 3
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
};

AcceptanceEstimate binomial_estimate(std::uint64_t accepted,
                                     std::uint64_t trials);

/// Fraction of single attempts that accept.
AcceptanceEstimate acceptance_rate(UpperBoundFamily& family,
                                   std::uint64_t trials, Rng& rng);

}  // namespace pmap
