#include "pmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "pmap/errors.hpp"

namespace pmap {

namespace {

std::string join_errors(const std::vector<std::string>& errs) {
  std::string s;
  for (const auto& e : errs) {
    if (!s.empty()) s += "; ";
    s += e;
  }
  return s;
}

// Arc consistency followed by a budgeted backtracking search. Returns false
// only when the model is provably infeasible.
bool feasible(const ModelTables& t) {
  const int n = static_cast<int>(t.domain_sizes.size());
  std::vector<std::vector<char>> alive(n);
  for (int i = 0; i < n; ++i) {
    alive[i].resize(t.domain_sizes[i]);
    for (int a = 0; a < t.domain_sizes[i]; ++a)
      alive[i][a] = t.unary[i][a] != kNegInf;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      const auto [u, v] = t.edges[e];
      const int dv = t.domain_sizes[v];
      for (int a = 0; a < t.domain_sizes[u]; ++a) {
        if (!alive[u][a]) continue;
        bool ok = false;
        for (int b = 0; b < dv && !ok; ++b)
          ok = alive[v][b] && t.pairwise[e][a * dv + b] != kNegInf;
        if (!ok) alive[u][a] = 0, changed = true;
      }
      for (int b = 0; b < dv; ++b) {
        if (!alive[v][b]) continue;
        bool ok = false;
        for (int a = 0; a < t.domain_sizes[u] && !ok; ++a)
          ok = alive[u][a] && t.pairwise[e][a * dv + b] != kNegInf;
        if (!ok) alive[v][b] = 0, changed = true;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (std::none_of(alive[i].begin(), alive[i].end(),
                     [](char c) { return c != 0; }))
      return false;

  bool has_pair_exclusion = false;
  for (const auto& p : t.pairwise)
    for (double v : p) has_pair_exclusion |= (v == kNegInf);
  if (!has_pair_exclusion) return true;

  // Edges to lower-numbered vertices, for the backtracking check.
  std::vector<std::vector<std::pair<int, int>>> back(n);
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const auto [u, v] = t.edges[e];
    back[std::max(u, v)].push_back({static_cast<int>(e), std::min(u, v)});
  }
  std::vector<int> x(n, -1);
  long budget = 1L << 22;
  auto consistent = [&](int i) {
    for (auto [e, j] : back[i]) {
      const auto [u, v] = t.edges[e];
      const int a = x[u], b = x[v];
      if (t.pairwise[e][a * t.domain_sizes[v] + b] == kNegInf) return false;
      (void)j;
    }
    return true;
  };
  int i = 0;
  while (i >= 0) {
    if (i == n) return true;
    if (--budget < 0) return true;  // undecided: assume feasible
    int a = x[i] + 1;
    while (a < t.domain_sizes[i] && !alive[i][a]) ++a;
    if (a >= t.domain_sizes[i]) {
      x[i] = -1;
      --i;
      continue;
    }
    x[i] = a;
    if (consistent(i)) ++i;
  }
  return false;
}

}  // namespace

std::vector<std::string> validate(const ModelTables& t) {
  std::vector<std::string> errs;
  const int n = static_cast<int>(t.domain_sizes.size());
  for (int i = 0; i < n; ++i)
    if (t.domain_sizes[i] < 1)
      errs.push_back("vertex " + std::to_string(i) + " has domain size " +
                     std::to_string(t.domain_sizes[i]));
  if (static_cast<int>(t.unary.size()) != n) {
    errs.push_back("unary table count " + std::to_string(t.unary.size()) +
                   " != vertex count " + std::to_string(n));
  } else {
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(t.unary[i].size()) != t.domain_sizes[i])
        errs.push_back("unary table of vertex " + std::to_string(i) +
                       " has size " + std::to_string(t.unary[i].size()));
  }
  if (t.pairwise.size() != t.edges.size())
    errs.push_back("pairwise table count " + std::to_string(t.pairwise.size()) +
                   " != edge count " + std::to_string(t.edges.size()));
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const auto [u, v] = t.edges[e];
    const std::string tag = "edge " + std::to_string(e) + " (" +
                            std::to_string(u) + "," + std::to_string(v) + ")";
    if (u < 0 || u >= n || v < 0 || v >= n) {
      errs.push_back(tag + " references a vertex outside [0," +
                     std::to_string(n) + ")");
      continue;
    }
    if (u == v) errs.push_back(tag + " is a self-loop");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      errs.push_back(tag + " is a duplicate");
    if (e < t.pairwise.size() && u < n && v < n &&
        t.pairwise[e].size() !=
            static_cast<std::size_t>(std::max(0, t.domain_sizes[u])) *
                static_cast<std::size_t>(std::max(0, t.domain_sizes[v])))
      errs.push_back(tag + " has pairwise table of size " +
                     std::to_string(t.pairwise[e].size()));
  }
  auto bad_value = [](double v) { return std::isnan(v) || v == HUGE_VAL; };
  for (std::size_t i = 0; i < t.unary.size(); ++i)
    for (double v : t.unary[i])
      if (bad_value(v)) {
        errs.push_back("unary table of vertex " + std::to_string(i) +
                       " contains NaN or +inf");
        break;
      }
  for (std::size_t e = 0; e < t.pairwise.size(); ++e)
    for (double v : t.pairwise[e])
      if (bad_value(v)) {
        errs.push_back("pairwise table of edge " + std::to_string(e) +
                       " contains NaN or +inf");
        break;
      }
  if (errs.empty() && !feasible(t))
    errs.push_back("model is infeasible: every configuration has energy -inf");
  return errs;
}

PairwiseModel::PairwiseModel() { index(); }

PairwiseModel::PairwiseModel(ModelTables tables) : t_(std::move(tables)) {
  const auto errs = validate(t_);
  if (!errs.empty()) throw InvalidInput("invalid model: " + join_errors(errs));
  index();
}

PairwiseModel::PairwiseModel(ModelTables tables, Unchecked)
    : t_(std::move(tables)) {
  index();
}

void PairwiseModel::index() {
  incident_.assign(t_.domain_sizes.size(), {});
  for (std::size_t e = 0; e < t_.edges.size(); ++e) {
    incident_[t_.edges[e].u].push_back(static_cast<int>(e));
    incident_[t_.edges[e].v].push_back(static_cast<int>(e));
  }
}

bool PairwiseModel::all_finite() const {
  for (const auto& u : t_.unary)
    for (double v : u)
      if (v == kNegInf) return false;
  for (const auto& p : t_.pairwise)
    for (double v : p)
      if (v == kNegInf) return false;
  return true;
}

void check_assignment(const PairwiseModel& model, std::span<const Label> x) {
  if (static_cast<int>(x.size()) != model.num_vertices())
    throw InvalidInput("assignment has length " + std::to_string(x.size()) +
                       ", model has " + std::to_string(model.num_vertices()) +
                       " vertices");
  for (int i = 0; i < model.num_vertices(); ++i)
    if (x[i] < 0 || x[i] >= model.domain_size(i))
      throw InvalidInput("label " + std::to_string(x[i]) + " of vertex " +
                         std::to_string(i) + " out of range");
}

double energy(const PairwiseModel& model, std::span<const Label> x) {
  check_assignment(model, x);
  double s = 0.0;
  for (int i = 0; i < model.num_vertices(); ++i) s += model.unary(i, x[i]);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto& ed = model.edge(e);
    s += model.pairwise(e, x[ed.u], x[ed.v]);
  }
  return s;
}

PairwiseModel generate_spin_glass(const SpinGlassConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1)
    throw InvalidInput("spin glass grid must be at least 1x1");
  if (!(cfg.field_range >= 0.0) || !(cfg.coupling_max >= 0.0))
    throw InvalidInput("field range and coupling maximum must be >= 0");
  const int n = cfg.rows * cfg.cols;
  ModelTables t;
  t.domain_sizes.assign(n, 2);
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c) {
      const int i = r * cfg.cols + c;
      if (c + 1 < cfg.cols) t.edges.push_back({i, i + 1});
      if (r + 1 < cfg.rows) t.edges.push_back({i, i + cfg.cols});
    }

  Rng rng = SeedPath(cfg.seed).rng();
  const double f = cfg.field_range;
  for (int i = 0; i < n; ++i) {
    const double h = -f + 2.0 * f * rng.uniform();
    t.unary.push_back({-h, h});
  }
  const double lo = cfg.attractive ? 0.0 : -cfg.coupling_max;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const double j = lo + (cfg.coupling_max - lo) * rng.uniform();
    t.pairwise.push_back({j, -j, -j, j});
  }
  return PairwiseModel(std::move(t), unchecked);
}

bool is_attractive(const PairwiseModel& model) {
  for (int i = 0; i < model.num_vertices(); ++i)
    if (model.domain_size(i) != 2) return false;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto p = model.pairwise(e);
    if (!(p[0] + p[3] >= p[1] + p[2])) return false;
  }
  return true;
}

bool is_forest(const PairwiseModel& model) {
  std::vector<int> parent(model.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& e : model.edges()) {
    const int a = find(e.u), b = find(e.v);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

PairwiseModel disjoint_union(const PairwiseModel& a, const PairwiseModel& b) {
  ModelTables t = a.tables();
  const int shift = a.num_vertices();
  const auto& tb = b.tables();
  t.domain_sizes.insert(t.domain_sizes.end(), tb.domain_sizes.begin(),
                        tb.domain_sizes.end());
  t.unary.insert(t.unary.end(), tb.unary.begin(), tb.unary.end());
  for (const auto& e : tb.edges) t.edges.push_back({e.u + shift, e.v + shift});
  t.pairwise.insert(t.pairwise.end(), tb.pairwise.begin(), tb.pairwise.end());
  return PairwiseModel(std::move(t), unchecked);
}

ConditionedModel condition(const PairwiseModel& model,
                           std::span<const int> vertices,
                           std::span<const Label> labels) {
  if (vertices.size() != labels.size())
    throw InvalidInput("condition: vertex and label lists differ in length");
  const int n = model.num_vertices();
  std::vector<Label> clamp(n, -1);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const int v = vertices[k];
    if (v < 0 || v >= n) throw InvalidInput("condition: vertex out of range");
    if (clamp[v] != -1) throw InvalidInput("condition: duplicate vertex");
    if (labels[k] < 0 || labels[k] >= model.domain_size(v))
      throw InvalidInput("condition: label out of range");
    clamp[v] = labels[k];
  }

  ConditionedModel out;
  std::vector<int> new_id(n, -1);
  ModelTables t;
  for (int i = 0; i < n; ++i) {
    if (clamp[i] >= 0) {
      out.offset += model.unary(i, clamp[i]);
      continue;
    }
    new_id[i] = static_cast<int>(out.free_vertices.size());
    out.free_vertices.push_back(i);
    t.domain_sizes.push_back(model.domain_size(i));
    const auto u = model.unary(i);
    t.unary.emplace_back(u.begin(), u.end());
  }
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [u, v] = model.edge(e);
    const bool cu = clamp[u] >= 0, cv = clamp[v] >= 0;
    if (cu && cv) {
      out.offset += model.pairwise(e, clamp[u], clamp[v]);
    } else if (cu) {
      auto& un = t.unary[new_id[v]];
      for (int b = 0; b < model.domain_size(v); ++b)
        un[b] += model.pairwise(e, clamp[u], b);
    } else if (cv) {
      auto& un = t.unary[new_id[u]];
      for (int a = 0; a < model.domain_size(u); ++a)
        un[a] += model.pairwise(e, a, clamp[v]);
    } else {
      t.edges.push_back({new_id[u], new_id[v]});
      const auto p = model.pairwise(e);
      t.pairwise.emplace_back(p.begin(), p.end());
    }
  }
  out.model = PairwiseModel(std::move(t), unchecked);
  return out;
}

Assignment ConditionedModel::lift(std::span<const int> clamped_vertices,
                                  std::span<const Label> clamped_labels,
                                  std::span<const Label> free_labels) const {
  const std::size_t n = clamped_vertices.size() + free_vertices.size();
  Assignment x(n, 0);
  for (std::size_t k = 0; k < clamped_vertices.size(); ++k)
    x[clamped_vertices[k]] = clamped_labels[k];
  for (std::size_t k = 0; k < free_vertices.size(); ++k)
    x[free_vertices[k]] = free_labels[k];
  return x;
}

std::uint64_t state_space_size(const PairwiseModel& model) {
  std::uint64_t s = 1;
  for (int d : model.domain_sizes()) {
    if (d != 0 && s > UINT64_MAX / static_cast<std::uint64_t>(d))
      return UINT64_MAX;
    s *= static_cast<std::uint64_t>(d);
  }
  return s;
}

}  // namespace pmap
