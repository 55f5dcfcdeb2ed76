#include "pmap/perturbation.hpp"

#include <cmath>

#include "pmap/errors.hpp"

namespace pmap {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::FULL: return "FULL";
    case Scheme::UNARY: return "UNARY";
    case Scheme::PAIRWISE: return "PAIRWISE";
  }
  return "?";
}

double sample_gumbel(Rng& rng) { return gumbel_from_uniform(rng.uniform()); }

namespace {

void add_noise(std::vector<double>& table, double weight, Rng& rng) {
  for (double& v : table)
    if (v != kNegInf) v += weight * sample_gumbel(rng);
}

}  // namespace

PairwiseModel perturb_weighted(const PairwiseModel& model,
                               std::span<const double> vertex_weight,
                               std::span<const double> edge_weight, Rng& rng) {
  if (static_cast<int>(vertex_weight.size()) != model.num_vertices())
    throw InvalidInput("perturb_weighted: one vertex weight per vertex required");
  if (!edge_weight.empty() &&
      static_cast<int>(edge_weight.size()) != model.num_edges())
    throw InvalidInput("perturb_weighted: one edge weight per edge required");
  ModelTables t = model.tables();
  for (std::size_t i = 0; i < t.unary.size(); ++i)
    add_noise(t.unary[i], vertex_weight[i], rng);
  if (!edge_weight.empty())
    for (std::size_t e = 0; e < t.pairwise.size(); ++e)
      add_noise(t.pairwise[e], edge_weight[e], rng);
  return PairwiseModel(std::move(t), unchecked);
}

PairwiseModel perturb_unary(const PairwiseModel& model, Rng& rng) {
  ModelTables t = model.tables();
  for (auto& u : t.unary) add_noise(u, 1.0, rng);
  return PairwiseModel(std::move(t), unchecked);
}

PairwiseModel perturb_pairwise(const PairwiseModel& model, Rng& rng) {
  ModelTables t = model.tables();
  for (auto& u : t.unary) add_noise(u, 1.0, rng);
  for (auto& p : t.pairwise) add_noise(p, 1.0, rng);
  return PairwiseModel(std::move(t), unchecked);
}

std::vector<double> perturb_full(const PairwiseModel& model, Rng& rng,
                                 std::uint64_t cap) {
  std::vector<double> table = energy_table(model, cap);
  add_noise(table, 1.0, rng);
  return table;
}

PairwiseModel perturb(const PairwiseModel& model, Scheme scheme, Rng& rng) {
  switch (scheme) {
    case Scheme::UNARY: return perturb_unary(model, rng);
    case Scheme::PAIRWISE: return perturb_pairwise(model, rng);
    case Scheme::FULL: break;
  }
  throw InvalidInput("FULL perturbation produces a table, not a model");
}

}  // namespace pmap
