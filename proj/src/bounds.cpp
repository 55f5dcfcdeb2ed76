#include "pmap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "pmap/detail/parallel.hpp"
#include "pmap/errors.hpp"
#include "pmap/perturbation.hpp"

namespace pmap {

BoundEstimate upper_bound(const PairwiseModel& model, std::uint64_t mc_samples,
                          const SeedPath& seed, SolverKind solver,
                          unsigned workers) {
  if (mc_samples < 1) throw InvalidInput("upper_bound: need at least one sample");
  const auto maxima =
      detail::parallel_map<double>(mc_samples, workers, [&](std::size_t k) {
        Rng rng = seed.child(k).rng();
        return solve_map(perturb_unary(model, rng), solver).value;
      });
  const auto stats = detail::mean_and_se(maxima);
  BoundEstimate b;
  b.value = stats.mean;
  b.kind = BoundKind::UPPER;
  b.samples = mc_samples;
  b.std_error = stats.std_error;
  b.seed = seed;
  return b;
}

std::vector<std::vector<int>> singleton_subsets(const PairwiseModel& model) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < model.num_vertices(); ++i) out.push_back({i});
  return out;
}

namespace {

void check_subsets(const PairwiseModel& model,
                   const std::vector<std::vector<int>>& subsets) {
  if (subsets.empty()) throw InvalidInput("lower_bound_expected: no subsets");
  for (const auto& s : subsets) {
    if (s.empty()) throw InvalidInput("lower_bound_expected: empty subset");
    std::set<int> seen;
    for (int v : s)
      if (v < 0 || v >= model.num_vertices() || !seen.insert(v).second)
        throw InvalidInput("lower_bound_expected: subset vertices must be distinct and in range");
  }
}

// Folds (1/|A|) gamma_a for subsets of size <= 2 into a copy of the tables.
PairwiseModel fold_subset_noise(const PairwiseModel& model,
                                const std::vector<std::vector<int>>& subsets,
                                Rng& rng) {
  ModelTables t = model.tables();
  const double w = 1.0 / static_cast<double>(subsets.size());
  for (const auto& s : subsets) {
    if (s.size() == 1) {
      for (double& v : t.unary[s[0]])
        if (v != kNegInf) v += w * sample_gumbel(rng);
      continue;
    }
    int a = s[0], b = s[1];
    int edge = -1;
    for (std::size_t e = 0; e < t.edges.size(); ++e)
      if ((t.edges[e].u == a && t.edges[e].v == b) ||
          (t.edges[e].u == b && t.edges[e].v == a))
        edge = static_cast<int>(e);
    if (edge < 0) {
      t.edges.push_back({a, b});
      t.pairwise.emplace_back(
          static_cast<std::size_t>(t.domain_sizes[a] * t.domain_sizes[b]), 0.0);
      edge = static_cast<int>(t.edges.size()) - 1;
    }
    // Noise is drawn in the subset's own label order (s[0] major).
    const auto [u, v] = t.edges[edge];
    const int dv = t.domain_sizes[v];
    for (int la = 0; la < t.domain_sizes[a]; ++la)
      for (int lb = 0; lb < t.domain_sizes[b]; ++lb) {
        const int xu = (u == a) ? la : lb, xv = (u == a) ? lb : la;
        double& entry = t.pairwise[edge][xu * dv + xv];
        if (entry != kNegInf) entry += w * sample_gumbel(rng);
      }
  }
  return PairwiseModel(std::move(t), unchecked);
}

}  // namespace

BoundEstimate lower_bound_expected(const PairwiseModel& model,
                                   const std::vector<std::vector<int>>& subsets,
                                   std::uint64_t mc_samples, const SeedPath& seed,
                                   SolverKind solver, std::uint64_t cap,
                                   unsigned workers) {
  if (mc_samples < 1) throw InvalidInput("lower_bound_expected: need at least one sample");
  check_subsets(model, subsets);
  const bool low_order = std::all_of(subsets.begin(), subsets.end(),
                                     [](const auto& s) { return s.size() <= 2; });
  std::vector<double> maxima;
  if (low_order) {
    maxima = detail::parallel_map<double>(mc_samples, workers, [&](std::size_t k) {
      Rng rng = seed.child(k).rng();
      return solve_map(fold_subset_noise(model, subsets, rng), solver, cap).value;
    });
  } else {
    const std::vector<double> energies = energy_table(model, cap);
    const auto& domains = model.domain_sizes();
    const std::size_t nconf = energies.size();
    // Joint-label index of each configuration within each subset.
    std::vector<std::vector<std::uint32_t>> cell(subsets.size(),
                                                 std::vector<std::uint32_t>(nconf));
    std::vector<std::size_t> cells(subsets.size(), 1);
    for (std::size_t a = 0; a < subsets.size(); ++a)
      for (int v : subsets[a]) cells[a] *= static_cast<std::size_t>(domains[v]);
    for (std::size_t k = 0; k < nconf; ++k) {
      const Assignment x = assignment_from_index(domains, k);
      for (std::size_t a = 0; a < subsets.size(); ++a) {
        std::uint32_t idx = 0;
        for (int v : subsets[a]) idx = idx * domains[v] + x[v];
        cell[a][k] = idx;
      }
    }
    const double w = 1.0 / static_cast<double>(subsets.size());
    maxima = detail::parallel_map<double>(mc_samples, workers, [&](std::size_t k) {
      Rng rng = seed.child(k).rng();
      std::vector<std::vector<double>> noise(subsets.size());
      for (std::size_t a = 0; a < subsets.size(); ++a) {
        noise[a].resize(cells[a]);
        for (double& g : noise[a]) g = sample_gumbel(rng);
      }
      double best = kNegInf;
      for (std::size_t c = 0; c < nconf; ++c) {
        if (energies[c] == kNegInf) continue;
        double v = energies[c];
        for (std::size_t a = 0; a < subsets.size(); ++a) v += w * noise[a][cell[a][c]];
        best = std::max(best, v);
      }
      if (best == kNegInf) throw Infeasible("lower_bound_expected: model is infeasible");
      return best;
    });
  }
  const auto stats = detail::mean_and_se(maxima);
  BoundEstimate b;
  b.value = stats.mean;
  b.kind = BoundKind::LOWER_EXPECTED;
  b.samples = mc_samples;
  b.std_error = stats.std_error;
  b.seed = seed;
  return b;
}

ReplicaExpansion expand_replicas(const PairwiseModel& model,
                                 std::span<const int> replicas,
                                 std::size_t max_edges) {
  const int n = model.num_vertices();
  if (static_cast<int>(replicas.size()) != n)
    throw InvalidInput("expand_replicas: one replica count per vertex required");
  std::size_t total_edges = 0;
  for (int i = 0; i < n; ++i)
    if (replicas[i] < 1) throw InvalidInput("expand_replicas: replica counts must be >= 1");
  for (const auto& e : model.edges())
    total_edges += static_cast<std::size_t>(replicas[e.u]) *
                   static_cast<std::size_t>(replicas[e.v]);
  if (total_edges > max_edges)
    throw StateSpaceTooLarge("expand_replicas: expansion has " +
                             std::to_string(total_edges) + " edges, cap is " +
                             std::to_string(max_edges));
  ReplicaExpansion out;
  out.copies.resize(n);
  ModelTables t;
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / replicas[i];
    for (int k = 0; k < replicas[i]; ++k) {
      out.copies[i].push_back(static_cast<int>(t.domain_sizes.size()));
      out.origin.push_back(i);
      out.vertex_weight.push_back(w);
      t.domain_sizes.push_back(model.domain_size(i));
      std::vector<double> u(model.unary(i).begin(), model.unary(i).end());
      for (double& v : u) v *= w;
      t.unary.push_back(std::move(u));
    }
  }
  t.edges.reserve(total_edges);
  t.pairwise.reserve(total_edges);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [u, v] = model.edge(e);
    const double w = 1.0 / (static_cast<double>(replicas[u]) * replicas[v]);
    std::vector<double> p(model.pairwise(e).begin(), model.pairwise(e).end());
    for (double& x : p) x *= w;
    for (int cu : out.copies[u])
      for (int cv : out.copies[v]) {
        t.edges.push_back({cu, cv});
        t.pairwise.push_back(p);
      }
  }
  out.model = PairwiseModel(std::move(t), unchecked);
  return out;
}

BoundEstimate lower_bound_probable(const PairwiseModel& model,
                                   std::span<const int> replicas,
                                   const SeedPath& seed, SolverKind solver,
                                   std::size_t max_edges) {
  const ReplicaExpansion ex = expand_replicas(model, replicas, max_edges);
  Rng rng = seed.rng();
  const PairwiseModel perturbed = perturb_weighted(ex.model, ex.vertex_weight, {}, rng);
  const MapResult r = solve_map(perturbed, solver);
  double spread = 0.0;
  for (int m : replicas) spread += 1.0 / m;
  BoundEstimate b;
  b.value = r.value;
  b.kind = BoundKind::LOWER_PROBABLE;
  b.samples = 1;
  b.analytic_std_error = kGumbelStdDev * std::sqrt(spread);
  b.epsilon_slack = 0.0;
  b.seed = seed;
  return b;
}

BoundEstimate lower_bound_probable(const PairwiseModel& model, int replicas,
                                   const SeedPath& seed, SolverKind solver) {
  const std::vector<int> m(model.num_vertices(), replicas);
  return lower_bound_probable(model, m, seed, solver);
}

double probable_bound_confidence(const PairwiseModel& model,
                                 std::span<const int> replicas, double eps) {
  const double dom = static_cast<double>(state_space_size(model));
  double s = 0.0;
  for (int m : replicas)
    s += std::numbers::pi * std::numbers::pi * dom / (6.0 * m * eps * eps);
  return 1.0 - s;
}

BoundsRow compute_bounds(const PairwiseModel& model, const BoundsReportConfig& cfg,
                         const SeedPath& seed) {
  BoundsRow row;
  if (cfg.exact) row.exact_logz = log_partition(model, cfg.cap);
  if (cfg.which.upper)
    row.upper = upper_bound(model, cfg.mc_samples, seed.child(0), cfg.solver, cfg.workers);
  if (cfg.which.lower_expected)
    row.lower_expected = lower_bound_expected(model, singleton_subsets(model),
                                              cfg.mc_samples, seed.child(1),
                                              cfg.solver, cfg.cap, cfg.workers);
  if (cfg.which.lower_probable)
    row.lower_probable = lower_bound_probable(model, cfg.replicas, seed.child(2), cfg.solver);
  if (row.upper && row.lower_probable)
    row.accept_proxy = std::min(1.0, std::exp(row.lower_probable->value - row.upper->value));
  return row;
}

std::vector<BoundsRow> bounds_report(const BoundsReportConfig& cfg) {
  std::vector<BoundsRow> rows;
  for (std::size_t ci = 0; ci < cfg.couplings.size(); ++ci) {
    for (std::uint64_t s : cfg.seeds) {
      SpinGlassConfig sg;
      sg.rows = cfg.rows;
      sg.cols = cfg.cols;
      sg.field_range = cfg.field_range;
      sg.coupling_max = cfg.couplings[ci];
      sg.seed = s;
      const PairwiseModel model = generate_spin_glass(sg);
      BoundsRow row = compute_bounds(model, cfg, SeedPath(cfg.root_seed).child(ci).child(s));
      row.coupling = cfg.couplings[ci];
      row.seed = s;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_number(std::optional<double> v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::string out = kBoundsCsvHeader;
  out += '\n';
  auto val = [](const std::optional<BoundEstimate>& b) {
    return b ? std::optional<double>(b->value) : std::nullopt;
  };
  auto se = [](const std::optional<BoundEstimate>& b) {
    return b ? b->std_error : std::nullopt;
  };
  for (const auto& r : rows) {
    out += format_number(r.coupling) + ',' + std::to_string(r.seed) + ',' +
           format_number(r.exact_logz) + ',' + format_number(val(r.upper)) + ',' +
           format_number(se(r.upper)) + ',' + format_number(val(r.lower_expected)) +
           ',' + format_number(se(r.lower_expected)) + ',' +
           format_number(val(r.lower_probable)) + ',' + format_number(r.accept_proxy) +
           '\n';
  }
  return out;
}

}  // namespace pmap
