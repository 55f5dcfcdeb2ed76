#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pmap/bounds.hpp"
#include "pmap/errors.hpp"
#include "pmap/perturbation.hpp"
#include "support/models.hpp"

using namespace pmap;

TEST_CASE("expected bounds sandwich log Z") {
  for (double c : {0.5, 2.0}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const PairwiseModel m = test::grid_spin_glass(3, 3, c, s);
      const double lz = log_partition(m);
      const BoundEstimate up = upper_bound(m, 2000, SeedPath(s).child(0));
      const BoundEstimate lo =
          lower_bound_expected(m, singleton_subsets(m), 2000, SeedPath(s).child(1));
      CHECK(up.kind == BoundKind::UPPER);
      CHECK(lo.kind == BoundKind::LOWER_EXPECTED);
      CHECK(up.value + 3 * *up.std_error >= lz);
      CHECK(lo.value - 3 * *lo.std_error <= lz);
    }
  }
}

TEST_CASE("independent vertices: the upper bound is exact in expectation") {
  // Without couplings the upper bound is exact in expectation.
  const PairwiseModel m = test::grid_spin_glass(3, 3, 0.0, 4);
  const double lz = log_partition(m);
  const BoundEstimate up = upper_bound(m, 5000, SeedPath(1));
  CHECK(std::abs(up.value - lz) < 3 * *up.std_error);
  const BoundEstimate lo = lower_bound_expected(m, singleton_subsets(m), 5000, SeedPath(2));
  CHECK(lo.value <= lz + 3 * *lo.std_error);
}

TEST_CASE("a single subset covering every vertex gives the full-perturbation estimate") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 9);
  const BoundEstimate b = lower_bound_expected(m, {{0, 1, 2, 3}}, 4000, SeedPath(3));
  CHECK(std::abs(b.value - log_partition(m)) < 3.5 * *b.std_error);
}

TEST_CASE("pair subsets agree between folding and enumeration") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 2);
  // {0, 3} is not an edge, so folding must add one.
  const std::vector<std::vector<int>> pairs{{0, 1}, {3, 0}};
  const BoundEstimate folded = lower_bound_expected(m, pairs, 3000, SeedPath(4));
  const BoundEstimate mixed = lower_bound_expected(m, {{0, 1}, {2, 3, 0}}, 3000, SeedPath(4));
  const double lz = log_partition(m);
  CHECK(folded.value <= lz + 3 * *folded.std_error);
  CHECK(mixed.value <= lz + 3 * *mixed.std_error);
}

TEST_CASE("subset validation") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 2);
  CHECK_THROWS_AS(lower_bound_expected(m, {}, 10, SeedPath(0)), InvalidInput);
  CHECK_THROWS_AS(lower_bound_expected(m, {{}}, 10, SeedPath(0)), InvalidInput);
  CHECK_THROWS_AS(lower_bound_expected(m, {{0, 0}}, 10, SeedPath(0)), InvalidInput);
  CHECK_THROWS_AS(lower_bound_expected(m, {{7}}, 10, SeedPath(0)), InvalidInput);
  CHECK_THROWS_AS(upper_bound(m, 0, SeedPath(0)), InvalidInput);
}

TEST_CASE("one replica per vertex is a single unary-perturbed MAP value") {
  const PairwiseModel m = test::grid_spin_glass(3, 3, 2.0, 6);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const BoundEstimate b = lower_bound_probable(m, 1, SeedPath(s));
    Rng rng = SeedPath(s).rng();
    CHECK(b.value == doctest::Approx(solve_map(perturb_unary(m, rng)).value).epsilon(1e-12));
    CHECK(*b.analytic_std_error == doctest::Approx(kGumbelStdDev * 3.0));
  }
}

TEST_CASE("replica expansion structure") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 3);
  const std::vector<int> reps{2, 3, 1, 2};
  const ReplicaExpansion ex = expand_replicas(m, reps);
  CHECK(ex.model.num_vertices() == 8);
  // Edges (0,1), (0,2), (1,3), (2,3).
  CHECK(ex.model.num_edges() == 2 * 3 + 2 * 1 + 3 * 2 + 1 * 2);
  CHECK(is_attractive(ex.model));
  CHECK(ex.copies[1].size() == 3);
  for (int c : ex.copies[1]) {
    CHECK(ex.origin[c] == 1);
    CHECK(ex.vertex_weight[c] == doctest::Approx(1.0 / 3));
    CHECK(ex.model.unary(c, 1) == doctest::Approx(m.unary(1, 1) / 3));
  }
  // Replica-constant configurations reproduce theta.
  Rng rng(5, 5);
  for (int k = 0; k < 8; ++k) {
    Assignment x(4), y(8);
    for (int i = 0; i < 4; ++i) {
      x[i] = static_cast<int>(rng.below(2));
      for (int c : ex.copies[i]) y[c] = x[i];
    }
    CHECK(energy(ex.model, y) == doctest::Approx(energy(m, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(expand_replicas(m, std::vector<int>{1, 1, 1}), InvalidInput);
  CHECK_THROWS_AS(expand_replicas(m, std::vector<int>{1, 0, 1, 1}), InvalidInput);
  CHECK_THROWS_AS(expand_replicas(m, std::vector<int>{50, 50, 50, 50}, 1000), StateSpaceTooLarge);
}

TEST_CASE("probable bound runs by graph cut at m = 50 and concentrates") {
  const PairwiseModel m = test::grid_spin_glass(3, 3, 2.0, 1);
  const double lz = log_partition(m);
  double s = 0.0;
  const int n = 40;
  for (int k = 0; k < n; ++k)
    s += lower_bound_probable(m, 50, SeedPath(11).child(k), SolverKind::GRAPHCUT).value;
  const double sd = kGumbelStdDev * std::sqrt(9.0 / 50);
  // The sample mean sits within a few of its spreads of log Z.
  CHECK(std::abs(s / n - lz) < 1.0 + 3 * sd / std::sqrt(n));
}

TEST_CASE("probable bound confidence") {
  const PairwiseModel m = test::grid_spin_glass(2, 2, 1.0, 3);
  const std::vector<int> reps(4, 100);
  const double expect = 1.0 - 4 * std::numbers::pi * std::numbers::pi * 16 / (6.0 * 100 * 0.25);
  CHECK(probable_bound_confidence(m, reps, 0.5) == doctest::Approx(expect));
  const std::vector<int> big(4, 1000000);
  CHECK(probable_bound_confidence(m, big, 1.0) > 0.99);
}

TEST_CASE("bounds report CSV") {
  BoundsReportConfig cfg;
  cfg.rows = 2;
  cfg.cols = 2;
  cfg.couplings = {0.5, 1.0};
  cfg.seeds = {0, 1, 2};
  cfg.mc_samples = 50;
  cfg.replicas = 5;
  const std::string csv = bounds_csv(bounds_report(cfg));
  CHECK(csv.starts_with(std::string(kBoundsCsvHeader) + "\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv == bounds_csv(bounds_report(cfg)));
  cfg.which.lower_expected = false;
  cfg.exact = false;
  const auto rows = bounds_report(cfg);
  CHECK_FALSE(rows[0].exact_logz);
  CHECK(rows[0].accept_proxy);
  CHECK(bounds_csv(rows).find(",NA,NA,") != std::string::npos);
  CHECK(format_number(std::nullopt) == "NA");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.3333333333");
}

TEST_CASE("bounds report cells are independent of the cell list") {
  BoundsReportConfig a;
  a.rows = 2;
  a.cols = 2;
  a.couplings = {1.0};
  a.seeds = {0, 1, 2};
  a.mc_samples = 30;
  a.replicas = 3;
  BoundsReportConfig b = a;
  b.seeds = {2};
  CHECK(bounds_report(a)[2].upper->value == bounds_report(b)[0].upper->value);
}

TEST_CASE("zero coupling: bound errors are centred within 3 sigma") {
  BoundsReportConfig cfg;
  cfg.couplings = {0.0};
  cfg.mc_samples = 2000;
  const auto rows = bounds_report(cfg);
  for (const auto& r : rows) {
    CHECK(std::abs(r.upper->value - *r.exact_logz) < 3 * *r.upper->std_error);
    CHECK(r.lower_expected->value - 3 * *r.lower_expected->std_error <= *r.exact_logz);
  }
}

TEST_CASE("zero coupling: probable bound error is a mean of independent Gumbels") {
  // A single row is a skewed draw, so pool many seeds instead.
  BoundsReportConfig cfg;
  cfg.couplings = {0.0};
  cfg.mc_samples = 10;
  cfg.seeds.clear();
  for (std::uint64_t s = 0; s < 200; ++s) cfg.seeds.push_back(s);
  double sum = 0, sq = 0;
  const auto rows = bounds_report(cfg);
  for (const auto& r : rows) {
    const double d = r.lower_probable->value - *r.exact_logz;
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(rows.size());
  const double sigma = *rows[0].lower_probable->analytic_std_error;
  const double mean = sum / n;
  CHECK(std::abs(mean) < 3 * sigma / std::sqrt(n));
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(sd == doctest::Approx(sigma).epsilon(0.15));
}
