#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pmap/errors.hpp"
#include "pmap/samplers.hpp"
#include "support/models.hpp"
#include "support/stats.hpp"

using namespace pmap;

namespace {

std::vector<std::uint64_t> histogram(const PairwiseModel& m, const std::vector<Assignment>& xs) {
  std::vector<std::uint64_t> counts(state_space_size(m), 0);
  for (const auto& x : xs) ++counts[assignment_index(m.domain_sizes(), x)];
  return counts;
}

}  // namespace

TEST_CASE("gumbel-max sampling matches the Gibbs distribution") {
  Rng rng(1, 0);
  for (int k = 0; k < 3; ++k) {
    const PairwiseModel m =
        k == 0 ? test::grid_spin_glass(2, 3, 1.0, 7)
               : test::random_model(rng, {3, 2, 4, 2}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 1.5);
    const GumbelMaxSampler sampler(m);
    Rng draw = SeedPath(100).child(k).rng();
    std::vector<Assignment> xs;
    for (int d = 0; d < 100000; ++d) xs.push_back(sampler(draw));
    const auto p = joint_distribution(m);
    CHECK(test::chi_square_p(histogram(m, xs), p) > 0.001);
  }
}

TEST_CASE("gumbel-max sampling respects -inf entries") {
  ModelTables t;
  t.domain_sizes = {2, 2};
  t.unary = {{0, 0}, {0, 0}};
  t.edges = {{0, 1}};
  t.pairwise = {{0, -INFINITY, -INFINITY, std::log(3.0)}};
  const PairwiseModel m(t);
  Rng rng(2, 2);
  std::vector<Assignment> xs;
  for (int d = 0; d < 20000; ++d) xs.push_back(gumbel_max_sample(m, rng));
  const auto h = histogram(m, xs);
  CHECK(h[1] == 0);
  CHECK(h[2] == 0);
  CHECK(test::chi_square_p(h, joint_distribution(m)) > 0.001);
}

TEST_CASE("full-perturbation log Z estimate") {
  const PairwiseModel m = test::grid_spin_glass(3, 3, 1.0, 7);
  const BoundEstimate b = estimate_logz_full(m, 4000, SeedPath(5), 0.1);
  const double lz = 9.425217554388812;
  CHECK(b.kind == BoundKind::POINT);
  CHECK(b.samples == 4000);
  CHECK(*b.analytic_std_error == doctest::Approx(std::numbers::pi / std::sqrt(6.0 * 4000)));
  CHECK(std::abs(b.value - lz) < 4 * *b.analytic_std_error);
  // The empirical spread of a max of Gumbels is the Gumbel spread.
  CHECK(*b.std_error == doctest::Approx(*b.analytic_std_error).epsilon(0.1));
  CHECK(*b.tail_probability ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / (6.0 * 4000 * 0.01)));
  CHECK(chebyshev_tail(100, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 600));
}

TEST_CASE("full-perturbation estimate is worker-count independent") {
  const PairwiseModel m = test::grid_spin_glass(2, 3, 2.0, 1);
  const BoundEstimate a = estimate_logz_full(m, 300, SeedPath(8), 0.1, kDefaultStateCap, 1);
  const BoundEstimate b = estimate_logz_full(m, 300, SeedPath(8), 0.1, kDefaultStateCap, 4);
  CHECK(a.value == b.value);
  CHECK(*a.std_error == *b.std_error);
}

TEST_CASE("unary perturbation is exact on independent vertices") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 0.0, 3, 2.0);
  const SampleBatch batch =
      approx_map_batch(m, Scheme::UNARY, SolverKind::AUTO, 50000, SeedPath(3));
  CHECK(batch.sampler == SamplerKind::APPROX_UNARY);
  CHECK(test::chi_square_p(histogram(m, batch.samples), joint_distribution(m)) > 0.001);
}

TEST_CASE("approximate batches are reproducible and parallel-safe") {
  const PairwiseModel m = test::grid_spin_glass(3, 3, 1.0, 2);
  const SampleBatch a = approx_map_batch(m, Scheme::UNARY, SolverKind::GRAPHCUT, 200, SeedPath(4), 1);
  const SampleBatch b = approx_map_batch(m, Scheme::UNARY, SolverKind::GRAPHCUT, 200, SeedPath(4), 3);
  CHECK(a.samples == b.samples);
  Rng rng = SeedPath(4).child(17).rng();
  CHECK(a.samples[17] == approx_map_sample(m, Scheme::UNARY, SolverKind::GRAPHCUT, rng));
  CHECK_THROWS_AS(approx_map_sample(m, Scheme::FULL, SolverKind::AUTO, rng), InvalidInput);
}

TEST_CASE("deterministic model gives a point mass") {
  ModelTables t;
  t.domain_sizes = {2, 2};
  t.unary = {{-INFINITY, 0}, {0, -INFINITY}};
  t.edges = {{0, 1}};
  t.pairwise = {{0, 0, 0, 0}};
  const PairwiseModel m(t);
  const auto est = approx_pair_marginal(m, {0, 1}, 3, 200, SeedPath(1));
  const Label x[] = {1, 0};
  CHECK(est.table.at(x) == 1.0);
}

TEST_CASE("tree expansion: identity at m = 1") {
  const PairwiseModel m = test::chain_spin_glass(5, 1, 1, 3);
  const ExpandedModel ex = expand_tree(m, {1, 2}, 1);
  CHECK(ex.model.num_vertices() == 5);
  CHECK(ex.model.num_edges() == 4);
  Rng rng(1, 1);
  for (int k = 0; k < 10; ++k) {
    Assignment x(5);
    for (auto& v : x) v = static_cast<int>(rng.below(2));
    CHECK(energy(ex.model, ex.lift(x)) == doctest::Approx(energy(m, x)).epsilon(1e-12));
  }
}

TEST_CASE("tree expansion: three-vertex chain with two copies") {
  // r - s - t anchored at (r, s): t is copied twice under s, each halved.
  const PairwiseModel m = test::chain_spin_glass(3, 1, 1, 4);
  const ExpandedModel ex = expand_tree(m, {0, 1}, 2);
  REQUIRE(ex.model.num_vertices() == 4);
  CHECK(ex.copy_map[2].size() == 2);
  for (int c : ex.copy_map[2]) {
    CHECK(ex.vertex_weight[c] == 0.5);
    CHECK(ex.model.unary(c, 1) == doctest::Approx(0.5 * m.unary(2, 1)));
  }
  CHECK(ex.model.num_edges() == 3);
  CHECK(is_forest(ex.model));
  CHECK(ex.project(ex.lift(Assignment{1, 0, 1})) == Assignment{1, 0, 1});
}

TEST_CASE("tree expansion: replica-constant energies on random forests") {
  Rng rng(12, 0);
  for (int k = 0; k < 20; ++k) {
    const PairwiseModel m = test::random_forest(rng, 9, 3, 1 << 14, 1.0);
    if (m.num_edges() == 0) continue;
    const Edge anchor = m.edge(static_cast<int>(rng.below(m.num_edges())));
    const ExpandedModel ex = expand_tree(m, anchor, 3);
    CHECK(is_forest(ex.model));
    CHECK(ex.copy_map[anchor.u].size() == 1);
    CHECK(ex.copy_map[anchor.v].size() == 1);
    for (int t = 0; t < 5; ++t) {
      Assignment x(m.num_vertices());
      for (int i = 0; i < m.num_vertices(); ++i) x[i] = static_cast<int>(rng.below(m.domain_size(i)));
      CHECK(energy(ex.model, ex.lift(x)) == doctest::Approx(energy(m, x)).epsilon(1e-10));
    }
    CHECK(tree_map(ex.model).value >= energy(ex.model, ex.lift(tree_map(m).argmax)) - 1e-9);
  }
}

TEST_CASE("tree expansion errors") {
  CHECK_THROWS_AS(expand_tree(test::grid_spin_glass(2, 2, 1, 0), {0, 1}, 2), CycleDetected);
  CHECK_THROWS_AS(expand_tree(test::chain_spin_glass(3, 1, 1, 0), {0, 2}, 2), InvalidInput);
  CHECK_THROWS_AS(expand_tree(test::chain_spin_glass(3, 1, 1, 0), {0, 1}, 0), InvalidInput);
  CHECK_THROWS_AS(expand_tree(test::chain_spin_glass(30, 1, 1, 0), {0, 1}, 10, 1000),
                  StateSpaceTooLarge);
}

TEST_CASE("pair marginal on an independent pair is the product of unary marginals") {
  ModelTables t;
  t.domain_sizes = {2, 3};
  t.unary = {{0.0, 1.0}, {0.5, -0.5, 0.0}};
  t.edges = {{0, 1}};
  t.pairwise = {std::vector<double>(6, 0.0)};
  const PairwiseModel m(t);
  const auto est = approx_pair_marginal(m, {0, 1}, 1, 40000, SeedPath(9), Scheme::UNARY);
  CHECK_FALSE(est.heuristic);
  const auto exact = marginal(m, std::vector<int>{0, 1});
  for (std::size_t k = 0; k < 6; ++k) {
    const double p = exact.probs[k];
    CHECK(std::abs(est.table.probs[k] - p) < 3.5 * std::sqrt(p * (1 - p) / 40000));
  }
}

TEST_CASE("pair marginal on a cyclic model is flagged heuristic") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1, 0);
  const auto est = approx_pair_marginal(m, {0, 1}, 3, 100, SeedPath(2));
  CHECK(est.heuristic);
  CHECK(est.replicas == 1);
}

TEST_CASE("replication reduces the anchor marginal error on a chain") {
  const PairwiseModel m = test::chain_spin_glass(6, 1, 2.0, 11);
  const std::vector<int> sub{2, 3};
  const auto exact = marginal(m, sub);
  const auto m1 = approx_pair_marginal(m, {2, 3}, 1, 20000, SeedPath(3));
  const auto m4 = approx_pair_marginal(m, {2, 3}, 4, 20000, SeedPath(3));
  CHECK(total_variation(m4.table, exact) < total_variation(m1.table, exact));
}
