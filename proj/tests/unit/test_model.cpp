#include <cmath>

#include "doctest.h"
#include "pmap/errors.hpp"
#include "pmap/model.hpp"
#include "support/models.hpp"
#include "support/stats.hpp"

using namespace pmap;

namespace {

ModelTables two_vertex_tables() {
  ModelTables t;
  t.domain_sizes = {2, 3};
  t.unary = {{0.5, -0.5}, {1.0, 0.0, -1.0}};
  t.edges = {{0, 1}};
  t.pairwise = {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
  return t;
}

}  // namespace

TEST_CASE("energy sums unary and pairwise terms") {
  const PairwiseModel m(two_vertex_tables());
  const Assignment x{1, 2};
  CHECK(energy(m, x) == doctest::Approx(-0.5 - 1.0 + 0.6));
  CHECK(m.pairwise(0, 1, 0) == 0.4);
  CHECK(m.incident()[1] == std::vector<int>{0});
}

TEST_CASE("validation rejects malformed tables") {
  auto bad = [](auto mutate) {
    ModelTables t = two_vertex_tables();
    mutate(t);
    return !validate(t).empty();
  };
  CHECK(validate(two_vertex_tables()).empty());
  CHECK(bad([](ModelTables& t) { t.domain_sizes[0] = 0; }));
  CHECK(bad([](ModelTables& t) { t.unary[1].pop_back(); }));
  CHECK(bad([](ModelTables& t) { t.edges[0] = {0, 0}; }));
  CHECK(bad([](ModelTables& t) { t.edges[0] = {0, 5}; }));
  CHECK(bad([](ModelTables& t) { t.pairwise[0].push_back(1.0); }));
  CHECK(bad([](ModelTables& t) { t.unary[0][0] = std::nan(""); }));
  CHECK(bad([](ModelTables& t) { t.unary[0][0] = INFINITY; }));
  CHECK(bad([](ModelTables& t) {
    t.edges.push_back({1, 0});
    t.pairwise.push_back(std::vector<double>(6, 0.0));
  }));
  CHECK(bad([](ModelTables& t) { t.unary[0] = {-INFINITY, -INFINITY}; }));
  // Feasible per vertex, infeasible jointly.
  CHECK(bad([](ModelTables& t) {
    t.pairwise[0] = {0, 0, 0, -INFINITY, -INFINITY, -INFINITY};
    t.unary[0] = {-INFINITY, 0};
  }));
  CHECK_THROWS_AS(PairwiseModel([] {
                    ModelTables t = two_vertex_tables();
                    t.unary[0][1] = std::nan("");
                    return t;
                  }()),
                  InvalidInput);
}

TEST_CASE("-inf entries are allowed when some configuration survives") {
  ModelTables t = two_vertex_tables();
  t.pairwise[0] = {-INFINITY, 0, 0, 0, -INFINITY, 0};
  const PairwiseModel m(t);
  CHECK_FALSE(m.all_finite());
  CHECK(energy(m, Assignment{0, 0}) == -INFINITY);
}

TEST_CASE("assignment checks") {
  const PairwiseModel m(two_vertex_tables());
  CHECK_THROWS_AS(energy(m, Assignment{0}), InvalidInput);
  CHECK_THROWS_AS(energy(m, Assignment{0, 3}), InvalidInput);
  CHECK_THROWS_AS(energy(m, Assignment{-1, 0}), InvalidInput);
}

TEST_CASE("spin glass generator matches the independent reference") {
  // Frozen from tests/oracles/spin_glass_reference.py 2 2 1 42.
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 42);
  const double fields[] = {-0.06282696332179005, -0.31827690122964236,
                           -0.3458732375932304, -0.09136879653022334};
  const double couplings[] = {0.6583155272123093, 0.773584684730215,
                              0.6706398529302326, 0.3791260699709878};
  REQUIRE(m.num_vertices() == 4);
  REQUIRE(m.num_edges() == 4);
  const Edge order[] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  for (int e = 0; e < 4; ++e) {
    CHECK(m.edge(e).u == order[e].u);
    CHECK(m.edge(e).v == order[e].v);
    const double j = couplings[e];
    CHECK(m.pairwise(e, 0, 0) == doctest::Approx(j).epsilon(1e-15));
    CHECK(m.pairwise(e, 0, 1) == doctest::Approx(-j).epsilon(1e-15));
    CHECK(m.pairwise(e, 1, 0) == doctest::Approx(-j).epsilon(1e-15));
    CHECK(m.pairwise(e, 1, 1) == doctest::Approx(j).epsilon(1e-15));
  }
  for (int i = 0; i < 4; ++i) {
    CHECK(m.unary(i, 1) == doctest::Approx(fields[i]).epsilon(1e-15));
    CHECK(m.unary(i, 0) == doctest::Approx(-fields[i]).epsilon(1e-15));
  }
}

TEST_CASE("spin glass energy equals the Ising form") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SpinGlassConfig cfg;
    cfg.rows = 3;
    cfg.cols = 4;
    cfg.coupling_max = 2.0;
    cfg.seed = seed;
    cfg.attractive = seed % 2 == 0;
    const PairwiseModel m = generate_spin_glass(cfg);
    CHECK(m.num_edges() == 3 * 3 + 2 * 4);
    CHECK(is_attractive(m) == cfg.attractive);
    Rng rng(seed, 99);
    for (int trial = 0; trial < 20; ++trial) {
      Assignment x(12);
      for (auto& v : x) v = static_cast<int>(rng.below(2));
      double ising = 0.0;
      for (int i = 0; i < 12; ++i) ising += m.unary(i, 1) * (2 * x[i] - 1);
      for (int e = 0; e < m.num_edges(); ++e)
        ising += m.pairwise(e, 1, 1) * (2 * x[m.edge(e).u] - 1) * (2 * x[m.edge(e).v] - 1);
      CHECK(energy(m, x) == doctest::Approx(ising).epsilon(1e-12));
    }
  }
}

TEST_CASE("spin glass parameter ranges and bad configs") {
  SpinGlassConfig cfg;
  cfg.rows = 5;
  cfg.cols = 5;
  cfg.field_range = 0.5;
  cfg.coupling_max = 3.0;
  const PairwiseModel m = generate_spin_glass(cfg);
  for (int i = 0; i < 25; ++i) CHECK(std::abs(m.unary(i, 1)) <= 0.5);
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(m.pairwise(e, 0, 0) >= 0.0);
    CHECK(m.pairwise(e, 0, 0) <= 3.0);
  }
  cfg.rows = 0;
  CHECK_THROWS_AS(generate_spin_glass(cfg), InvalidInput);
  cfg.rows = 2;
  cfg.coupling_max = -1;
  CHECK_THROWS_AS(generate_spin_glass(cfg), InvalidInput);
}

TEST_CASE("zero coupling gives zero pairwise tables") {
  const PairwiseModel m = test::grid_spin_glass(3, 3, 0.0, 1);
  for (int e = 0; e < m.num_edges(); ++e)
    for (double v : m.pairwise(e)) CHECK(v == 0.0);
}

TEST_CASE("forest detection") {
  CHECK(is_forest(test::chain_spin_glass(6, 1, 1, 0)));
  CHECK_FALSE(is_forest(test::grid_spin_glass(2, 2, 1, 0)));
  Rng rng(1, 2);
  for (int k = 0; k < 20; ++k) CHECK(is_forest(test::random_forest(rng, 10, 3, 1 << 16)));
}

TEST_CASE("disjoint union renumbers and adds energies") {
  const PairwiseModel a = test::grid_spin_glass(1, 2, 1, 3);
  const PairwiseModel b = test::grid_spin_glass(2, 2, 1, 4);
  const PairwiseModel u = disjoint_union(a, b);
  CHECK(u.num_vertices() == 6);
  CHECK(u.num_edges() == 5);
  const Assignment xa{1, 0}, xb{0, 1, 1, 0};
  Assignment xu{1, 0, 0, 1, 1, 0};
  CHECK(energy(u, xu) == doctest::Approx(energy(a, xa) + energy(b, xb)));
}

TEST_CASE("conditioning preserves energies") {
  Rng rng(7, 7);
  const PairwiseModel m =
      test::random_model(rng, {2, 3, 2, 4}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const std::vector<int> clamped{3, 1};
  const std::vector<int> labels{2, 0};
  const ConditionedModel c = condition(m, clamped, labels);
  CHECK(c.free_vertices == std::vector<int>{0, 2});
  CHECK(c.model.num_vertices() == 2);
  test::naive_enumerate(c.model.domain_sizes(), [&](const std::vector<int>& free) {
    const Assignment full = c.lift(clamped, labels, free);
    CHECK(full[3] == 2);
    CHECK(full[1] == 0);
    CHECK(c.offset + energy(c.model, free) == doctest::Approx(energy(m, full)).epsilon(1e-12));
  });
  CHECK_THROWS_AS(condition(m, std::vector<int>{1, 1}, std::vector<int>{0, 0}), InvalidInput);
  CHECK_THROWS_AS(condition(m, std::vector<int>{1}, std::vector<int>{3}), InvalidInput);
}

TEST_CASE("state space size saturates") {
  CHECK(state_space_size(test::grid_spin_glass(3, 3, 1, 0)) == 512);
  CHECK(state_space_size(test::grid_spin_glass(10, 10, 1, 0)) == UINT64_MAX);
}
