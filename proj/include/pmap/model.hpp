#pragma once

// Discrete pairwise graphical models
//
//   theta(x) = sum_i theta_i(x_i) + sum_{(i,j) in E} theta_ij(x_i, x_j)
//
// with dense potential tables. An entry equal to kNegInf excludes the
// corresponding labels from the effective domain.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pmap/rng.hpp"

namespace pmap {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Label = int;
using Assignment = std::vector<Label>;

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Raw tables; may violate model invariants. See validate().
struct ModelTables {
  std::vector<int> domain_sizes;
  std::vector<std::vector<double>> unary;
  std::vector<Edge> edges;
  /// Row-major |X_u| x |X_v| table per edge: pairwise[e][a * |X_v| + b].
  std::vector<std::vector<double>> pairwise;
};

/// Tag for constructing a model whose invariants the caller guarantees.
struct Unchecked {};
inline constexpr Unchecked unchecked{};

/// Immutable pairwise model. Construction validates every invariant.
class PairwiseModel {
 public:
  PairwiseModel();
  explicit PairwiseModel(ModelTables tables);
  PairwiseModel(ModelTables tables, Unchecked);

  int num_vertices() const { return static_cast<int>(t_.domain_sizes.size()); }
  int num_edges() const { return static_cast<int>(t_.edges.size()); }
  int domain_size(int i) const { return t_.domain_sizes[i]; }
  const std::vector<int>& domain_sizes() const { return t_.domain_sizes; }
  const std::vector<Edge>& edges() const { return t_.edges; }
  const Edge& edge(int e) const { return t_.edges[e]; }

  std::span<const double> unary(int i) const { return t_.unary[i]; }
  double unary(int i, Label a) const { return t_.unary[i][a]; }
  std::span<const double> pairwise(int e) const { return t_.pairwise[e]; }
  double pairwise(int e, Label a, Label b) const {
    return t_.pairwise[e][a * t_.domain_sizes[t_.edges[e].v] + b];
  }

  const ModelTables& tables() const { return t_; }

  /// Incident edge ids per vertex.
  const std::vector<std::vector<int>>& incident() const { return incident_; }

  /// True when no table entry is -inf.
  bool all_finite() const;

 private:
  void index();

  ModelTables t_;
  std::vector<std::vector<int>> incident_;
};

/// Grid spin glass: fields U[-f, f], couplings U[0, c] (or U[-c, c] when
/// attractive is false). Spins -1/+1 are encoded as labels 0/1.
struct SpinGlassConfig {
  int rows = 1;
  int cols = 1;
  double field_range = 1.0;
  double coupling_max = 1.0;
  std::uint64_t seed = 0;
  bool attractive = true;
};

/// All invariant violations of a table set; empty when valid.
std::vector<std::string> validate(const ModelTables& tables);

double energy(const PairwiseModel& model, std::span<const Label> x);

/// Throws InvalidInput unless x is a full in-range assignment.
void check_assignment(const PairwiseModel& model, std::span<const Label> x);

PairwiseModel generate_spin_glass(const SpinGlassConfig& cfg);

/// Binary with supermodular pairwise tables.
bool is_attractive(const PairwiseModel& model);

/// True when the edge graph has no cycles.
bool is_forest(const PairwiseModel& model);

/// Vertex-disjoint union; vertices of b are renumbered after those of a.
PairwiseModel disjoint_union(const PairwiseModel& a, const PairwiseModel& b);

/// Model over the free vertices after clamping some vertices to labels.
struct ConditionedModel {
  PairwiseModel model;
  std::vector<int> free_vertices;  // original ids, in increasing order
  double offset = 0.0;             // energy of terms fully inside the clamp

  /// Original-space assignment from clamped labels and a free assignment.
  Assignment lift(std::span<const int> clamped_vertices,
                  std::span<const Label> clamped_labels,
                  std::span<const Label> free_labels) const;
};

ConditionedModel condition(const PairwiseModel& model,
                           std::span<const int> vertices,
                           std::span<const Label> labels);

/// Total number of configurations; saturates at UINT64_MAX.
std::uint64_t state_space_size(const PairwiseModel& model);

}  // namespace pmap
