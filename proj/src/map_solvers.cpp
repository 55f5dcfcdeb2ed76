#include "pmap/map_solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pmap/detail/enumerate.hpp"
#include "pmap/errors.hpp"
#include "pmap/flow.hpp"

namespace pmap {

const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::AUTO: return "AUTO";
    case SolverKind::EXHAUSTIVE: return "EXHAUSTIVE";
    case SolverKind::TREE: return "TREE";
    case SolverKind::GRAPHCUT: return "GRAPHCUT";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& s) {
  std::string k;
  for (char c : s) k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "auto") return SolverKind::AUTO;
  if (k == "exhaustive") return SolverKind::EXHAUSTIVE;
  if (k == "tree") return SolverKind::TREE;
  if (k == "graphcut" || k == "graph-cut") return SolverKind::GRAPHCUT;
  throw InvalidInput("unknown MAP strategy \"" + s + "\"");
}

MapResult exhaustive_map(const PairwiseModel& model, std::uint64_t cap) {
  require_state_space(model, cap);
  MapResult r;
  r.solver = SolverKind::EXHAUSTIVE;
  detail::for_each_energy(model, [&](const Assignment& x, double e) {
    if (e > r.value) {
      r.value = e;
      r.argmax = x;
      r.ties_possible = false;
    } else if (e == r.value && e != kNegInf) {
      r.ties_possible = true;
    }
  });
  if (r.value == kNegInf) throw Infeasible("exhaustive_map: model is infeasible");
  r.value = energy(model, r.argmax);
  return r;
}

MapResult tree_map(const PairwiseModel& model) {
  if (!is_forest(model)) throw CycleDetected("tree_map: edge graph has a cycle");
  const int n = model.num_vertices();
  std::vector<int> parent(n, -1), parent_edge(n, -1), order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    std::size_t head = order.size();
    order.push_back(root);
    while (head < order.size()) {
      const int u = order[head++];
      for (int e : model.incident()[u]) {
        const auto& ed = model.edge(e);
        const int w = ed.u == u ? ed.v : ed.u;
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = u;
        parent_edge[w] = e;
        order.push_back(w);
      }
    }
  }

  // belief[v](x_v): best energy of v's subtree given x_v.
  std::vector<std::vector<double>> belief(n);
  for (int v = 0; v < n; ++v) {
    const auto u = model.unary(v);
    belief[v].assign(u.begin(), u.end());
  }
  // back[v][x_parent] = best x_v.
  std::vector<std::vector<Label>> back(n);
  bool ties = false;
  for (std::size_t k = order.size(); k-- > 0;) {
    const int v = order[k];
    const int p = parent[v];
    if (p < 0) continue;
    const int e = parent_edge[v];
    const bool p_is_u = model.edge(e).u == p;
    const int dp = model.domain_size(p), dv = model.domain_size(v);
    back[v].assign(dp, 0);
    for (Label a = 0; a < dp; ++a) {
      double best = kNegInf;
      Label arg = 0;
      for (Label b = 0; b < dv; ++b) {
        const double s = belief[v][b] +
                         (p_is_u ? model.pairwise(e, a, b) : model.pairwise(e, b, a));
        if (s > best) {
          best = s;
          arg = b;
        } else if (s == best && s != kNegInf) {
          ties = true;
        }
      }
      back[v][a] = arg;
      belief[p][a] += best;
    }
  }

  MapResult r;
  r.solver = SolverKind::TREE;
  r.argmax.assign(n, 0);
  for (int v : order) {
    if (parent[v] >= 0) {
      r.argmax[v] = back[v][r.argmax[parent[v]]];
      continue;
    }
    double best = kNegInf;
    Label arg = 0;
    for (Label a = 0; a < model.domain_size(v); ++a) {
      if (belief[v][a] > best) {
        best = belief[v][a];
        arg = a;
      } else if (belief[v][a] == best && best != kNegInf) {
        ties = true;
      }
    }
    if (best == kNegInf) throw Infeasible("tree_map: model is infeasible");
    r.argmax[v] = arg;
  }
  r.value = energy(model, r.argmax);
  r.ties_possible = ties;
  return r;
}

MapResult graphcut_map(const PairwiseModel& model) {
  if (!is_attractive(model))
    throw NotAttractive("graphcut_map: model is not binary supermodular");
  if (!model.all_finite())
    throw InvalidInput("graphcut_map: tables must not contain -inf");
  const int n = model.num_vertices();
  const int s = n, t = n + 1;
  FlowNetwork net(n + 2, s, t);

  // Minimize F = -theta. Each pairwise term is decomposed as
  //   F(x_u,x_v) = A + (C-A) x_u + (D-C) x_v + (B+C-A-D) (1-x_u) x_v
  // with A = F(0,0), B = F(0,1), C = F(1,0), D = F(1,1).
  std::vector<double> coef(n, 0.0);  // cost of x_i = 1 relative to x_i = 0
  for (int i = 0; i < n; ++i) coef[i] = model.unary(i, 0) - model.unary(i, 1);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [u, v] = model.edge(e);
    const double A = -model.pairwise(e, 0, 0), B = -model.pairwise(e, 0, 1);
    const double C = -model.pairwise(e, 1, 0), D = -model.pairwise(e, 1, 1);
    coef[u] += C - A;
    coef[v] += D - C;
    const double w = B + C - A - D;
    if (w > 0.0) net.add_arc(u, v, w);
  }
  for (int i = 0; i < n; ++i) {
    if (coef[i] > 0.0) net.add_arc(s, i, coef[i]);
    else if (coef[i] < 0.0) net.add_arc(i, t, -coef[i]);
  }
  net.max_flow();
  const auto src = net.source_side();
  const auto snk = net.sink_side();

  MapResult r;
  r.solver = SolverKind::GRAPHCUT;
  r.argmax.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    r.argmax[i] = snk[i] ? 1 : 0;
    // A node on neither side can move without changing the cut value.
    if (!src[i] && !snk[i]) r.ties_possible = true;
  }
  r.value = energy(model, r.argmax);
  return r;
}

SolverKind auto_solver(const PairwiseModel& model) {
  if (is_attractive(model) && model.all_finite()) return SolverKind::GRAPHCUT;
  if (is_forest(model)) return SolverKind::TREE;
  return SolverKind::EXHAUSTIVE;
}

MapResult solve_map(const PairwiseModel& model, SolverKind strategy,
                    std::uint64_t cap) {
  if (strategy == SolverKind::AUTO) strategy = auto_solver(model);
  switch (strategy) {
    case SolverKind::EXHAUSTIVE: return exhaustive_map(model, cap);
    case SolverKind::TREE: return tree_map(model);
    case SolverKind::GRAPHCUT: return graphcut_map(model);
    case SolverKind::AUTO: break;
  }
  throw InvalidInput("solve_map: unknown strategy");
}

}  // namespace pmap
