#include <cmath>

#include "doctest.h"
#include "pmap/errors.hpp"
#include "pmap/flow.hpp"
#include "pmap/map_solvers.hpp"
#include "support/models.hpp"
#include "support/stats.hpp"

using namespace pmap;

namespace {

double naive_max(const PairwiseModel& m) {
  double best = -INFINITY;
  test::naive_enumerate(m.domain_sizes(), [&](const std::vector<int>& x) {
    best = std::max(best, test::naive_energy(m.tables(), x));
  });
  return best;
}

}  // namespace

TEST_CASE("max flow on a textbook network") {
  // Cormen et al. flow network; maximum flow 23.
  FlowNetwork net(6, 0, 5);
  net.add_arc(0, 1, 16);
  net.add_arc(0, 2, 13);
  net.add_arc(2, 1, 4);
  net.add_arc(1, 3, 12);
  net.add_arc(3, 2, 9);
  net.add_arc(2, 4, 14);
  net.add_arc(4, 3, 7);
  net.add_arc(3, 5, 20);
  net.add_arc(4, 5, 4);
  CHECK(net.max_flow() == doctest::Approx(23.0));
  const auto s = net.source_side();
  CHECK(s[0]);
  CHECK_FALSE(s[5]);
  const auto t = net.sink_side();
  CHECK(t[5]);
}

TEST_CASE("max flow with no path and with parallel arcs") {
  FlowNetwork a(3, 0, 2);
  a.add_arc(0, 1, 5);
  CHECK(a.max_flow() == 0.0);
  FlowNetwork b(2, 0, 1);
  const int first = b.add_arc(0, 1, 1.5);
  b.add_arc(0, 1, 2.5);
  CHECK(b.max_flow() == doctest::Approx(4.0));
  CHECK(b.flow_on(first) == doctest::Approx(1.5));
}

TEST_CASE("exhaustive map picks the smallest tied assignment") {
  const PairwiseModel flat = test::grid_spin_glass(2, 2, 0.0, 0, 0.0);
  const MapResult r = exhaustive_map(flat);
  CHECK(r.argmax == Assignment{0, 0, 0, 0});
  CHECK(r.ties_possible);
  CHECK(r.value == 0.0);
  const MapResult s = exhaustive_map(test::grid_spin_glass(2, 2, 1.0, 3));
  CHECK_FALSE(s.ties_possible);
  CHECK(s.solver == SolverKind::EXHAUSTIVE);
}

TEST_CASE("graph cut equals exhaustive on random attractive models") {
  Rng rng(31, 0);
  for (int k = 0; k < 60; ++k) {
    const PairwiseModel m = (k % 2) ? test::random_attractive_grid(rng, 3, 4)
                                    : test::grid_spin_glass(3, 4, 3.0 * rng.uniform(), k);
    const MapResult g = graphcut_map(m);
    const MapResult e = exhaustive_map(m);
    CHECK(g.value == doctest::Approx(e.value).epsilon(1e-12));
    CHECK(g.value == energy(m, g.argmax));
    CHECK(e.value == doctest::Approx(naive_max(m)).epsilon(1e-12));
  }
}

TEST_CASE("graph cut on a strongly coupled chain takes all zeros on a tie") {
  ModelTables t;
  t.domain_sizes = {2, 2};
  t.unary = {{0, 0}, {0, 0}};
  t.edges = {{0, 1}};
  t.pairwise = {{1, 0, 0, 1}};
  const MapResult r = graphcut_map(PairwiseModel(t));
  CHECK(r.value == 1.0);
  CHECK(r.argmax == Assignment{0, 0});
}

TEST_CASE("graph cut rejects unsuitable models") {
  SpinGlassConfig cfg;
  cfg.rows = 2;
  cfg.cols = 2;
  cfg.seed = 1;
  cfg.attractive = false;
  cfg.coupling_max = 1.0;
  CHECK_THROWS_AS(graphcut_map(generate_spin_glass(cfg)), NotAttractive);
  ModelTables t;
  t.domain_sizes = {3};
  t.unary = {{0, 0, 0}};
  CHECK_THROWS_AS(graphcut_map(PairwiseModel(t)), NotAttractive);
  ModelTables u;
  u.domain_sizes = {2, 2};
  u.unary = {{0, -INFINITY}, {0, 0}};
  u.edges = {{0, 1}};
  u.pairwise = {{1, 0, 0, 1}};
  CHECK_THROWS_AS(graphcut_map(PairwiseModel(u)), InvalidInput);
}

TEST_CASE("tree max-product equals exhaustive on random forests") {
  Rng rng(41, 0);
  for (int k = 0; k < 80; ++k) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const PairwiseModel m = test::random_forest(rng, n, 4, 1 << 18);
    const MapResult t = tree_map(m);
    const MapResult e = exhaustive_map(m);
    CHECK(t.value == doctest::Approx(e.value).epsilon(1e-12));
    CHECK(t.value == energy(m, t.argmax));
  }
}

TEST_CASE("tree map handles -inf entries") {
  ModelTables t;
  t.domain_sizes = {3, 3, 2};
  t.unary = {{5, -INFINITY, 0}, {0, 0, 0}, {0, 1}};
  t.edges = {{0, 1}, {2, 1}};
  t.pairwise = {{-INFINITY, 0, 0, 0, 0, 0, 0, 0, -INFINITY}, {0, -INFINITY, 1, 0, 0, 0}};
  const PairwiseModel m(t);
  const MapResult r = tree_map(m);
  CHECK(r.value == doctest::Approx(exhaustive_map(m).value));
  CHECK(std::isfinite(r.value));
}

TEST_CASE("tree map rejects cycles") {
  CHECK_THROWS_AS(tree_map(test::grid_spin_glass(2, 2, 1, 0)), CycleDetected);
}

TEST_CASE("automatic solver selection") {
  CHECK(auto_solver(test::grid_spin_glass(3, 3, 1, 0)) == SolverKind::GRAPHCUT);
  Rng rng(1, 9);
  const PairwiseModel forest = test::random_model(rng, {3, 3, 3}, {{0, 1}, {1, 2}});
  CHECK(auto_solver(forest) == SolverKind::TREE);
  const PairwiseModel loop = test::random_model(rng, {3, 3, 3}, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(auto_solver(loop) == SolverKind::EXHAUSTIVE);
  CHECK(solve_map(loop).solver == SolverKind::EXHAUSTIVE);
  CHECK(solve_map(forest, SolverKind::EXHAUSTIVE).value ==
        doctest::Approx(solve_map(forest).value));
  CHECK_THROWS_AS(solve_map(test::grid_spin_glass(5, 5, 1, 0), SolverKind::EXHAUSTIVE, 1000),
                  StateSpaceTooLarge);
}

TEST_CASE("solver names") {
  for (auto k : {SolverKind::AUTO, SolverKind::EXHAUSTIVE, SolverKind::TREE, SolverKind::GRAPHCUT})
    CHECK(solver_from_string(to_string(k)) == k);
  CHECK(solver_from_string("graphcut") == SolverKind::GRAPHCUT);
  CHECK_THROWS_AS(solver_from_string("simplex"), InvalidInput);
}

TEST_CASE("graph cut scales to large grids") {
  const PairwiseModel m = test::grid_spin_glass(40, 40, 2.0, 5);
  const MapResult r = graphcut_map(m);
  CHECK(r.value == energy(m, r.argmax));
  // Flipping any single site cannot improve a global maximum.
  Assignment x = r.argmax;
  for (int i = 0; i < m.num_vertices(); i += 37) {
    x[i] ^= 1;
    CHECK(energy(m, x) <= r.value + 1e-9);
    x[i] ^= 1;
  }
}
