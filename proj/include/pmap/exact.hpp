#pragma once

// Brute-force ground truth by enumeration of the full configuration space.
//
// Configurations are enumerated in lexicographic order with vertex 0 as the
// most significant digit; "index" below always refers to that order.

#include <cstdint>
#include <span>
#include <vector>

#include "pmap/model.hpp"
#include "pmap/rng.hpp"

namespace pmap {

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 24;

/// Throws StateSpaceTooLarge when the model has more than cap configurations.
void require_state_space(const PairwiseModel& model, std::uint64_t cap);

std::uint64_t assignment_index(std::span<const int> domains,
                               std::span<const Label> x);
Assignment assignment_from_index(std::span<const int> domains,
                                 std::uint64_t index);

/// theta(x) for every configuration, by index.
std::vector<double> energy_table(const PairwiseModel& model,
                                 std::uint64_t cap = kDefaultStateCap);

/// log Z by streaming log-sum-exp; -inf for an infeasible model.
double log_partition(const PairwiseModel& model,
                     std::uint64_t cap = kDefaultStateCap);

/// Gibbs probabilities of every configuration, by index.
std::vector<double> joint_distribution(const PairwiseModel& model,
                                       std::uint64_t cap = kDefaultStateCap);

struct MarginalTable {
  std::vector<int> subset;
  std::vector<int> shape;     // domain size of each subset vertex
  std::vector<double> probs;  // row-major over the subset labels

  double at(std::span<const Label> labels) const;
};

MarginalTable marginal(const PairwiseModel& model, std::span<const int> subset,
                       std::uint64_t cap = kDefaultStateCap);

/// Single-vertex marginals of every vertex.
std::vector<MarginalTable> vertex_marginals(
    const PairwiseModel& model, std::uint64_t cap = kDefaultStateCap);

/// Empirical table of the given subset over a set of samples.
MarginalTable empirical_marginal(const PairwiseModel& model,
                                 std::span<const int> subset,
                                 std::span<const Assignment> samples);

/// 1/2 sum |p - q|; throws InvalidInput on shape mismatch.
double total_variation(const MarginalTable& p, const MarginalTable& q);
double total_variation(std::span<const double> p, std::span<const double> q);

/// Mean over vertices of the single-vertex total variation.
double mean_vertex_tv(const std::vector<MarginalTable>& p,
                      const std::vector<MarginalTable>& q);

/// Exact sequential sampler: draws x_j from its conditional given the prefix,
/// with the conditional masses taken from the enumerated joint table.
class ExactSampler {
 public:
  explicit ExactSampler(const PairwiseModel& model,
                        std::uint64_t cap = kDefaultStateCap);

  Assignment operator()(Rng& rng) const;

  double log_z() const { return log_z_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::vector<int> domains_;
  std::vector<std::uint64_t> stride_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;  // cumulative_[k] = sum_{i<k} probs_[i]
  double log_z_ = 0.0;
};

Assignment exact_sample(const PairwiseModel& model, Rng& rng,
                        std::uint64_t cap = kDefaultStateCap);

}  // namespace pmap
