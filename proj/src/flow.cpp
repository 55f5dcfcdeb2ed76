#include "pmap/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmap/errors.hpp"

namespace pmap {

FlowNetwork::FlowNetwork(int num_nodes, int source, int sink)
    : source_(source), sink_(sink), head_(num_nodes, -1) {
  if (num_nodes < 2 || source < 0 || sink < 0 || source >= num_nodes ||
      sink >= num_nodes || source == sink)
    throw InvalidInput("flow network needs distinct in-range source and sink");
}

int FlowNetwork::add_arc(int from, int to, double capacity) {
  if (!(capacity >= 0.0) || !std::isfinite(capacity))
    throw InvalidInput("arc capacity must be finite and non-negative");
  if (from < 0 || to < 0 || from >= num_nodes() || to >= num_nodes())
    throw InvalidInput("arc endpoint out of range");
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, head_[from], capacity});
  head_[from] = id;
  arcs_.push_back({from, head_[to], 0.0});
  head_[to] = id + 1;
  max_capacity_ = std::max(max_capacity_, capacity);
  return id;
}

bool FlowNetwork::build_levels() {
  level_.assign(head_.size(), -1);
  std::vector<int> queue{source_};
  level_[source_] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int u = queue[q];
    for (int a = head_[u]; a != -1; a = arcs_[a].next) {
      const Arc& arc = arcs_[a];
      if (arc.residual > eps_ && level_[arc.to] < 0) {
        level_[arc.to] = level_[u] + 1;
        queue.push_back(arc.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

// Iterative DFS over the level graph; saturates one path at a time.
double FlowNetwork::push_blocking() {
  double total = 0.0;
  std::vector<int> path;  // arc ids from the source
  int u = source_;
  while (true) {
    if (u == sink_) {
      double bottleneck = std::numeric_limits<double>::infinity();
      for (int a : path) bottleneck = std::min(bottleneck, arcs_[a].residual);
      for (int a : path) {
        arcs_[a].residual -= bottleneck;
        arcs_[a ^ 1].residual += bottleneck;
      }
      total += bottleneck;
      // Retreat to the tail of the first saturated arc.
      std::size_t keep = 0;
      while (keep < path.size() && arcs_[path[keep]].residual > eps_) ++keep;
      path.resize(keep);
      u = path.empty() ? source_ : arcs_[path.back()].to;
      continue;
    }
    int& a = cursor_[u];
    while (a != -1 && !(arcs_[a].residual > eps_ &&
                        level_[arcs_[a].to] == level_[u] + 1))
      a = arcs_[a].next;
    if (a != -1) {
      path.push_back(a);
      u = arcs_[a].to;
      continue;
    }
    // Dead end: remove u from the level graph and retreat.
    level_[u] = -1;
    if (path.empty()) return total;
    path.pop_back();
    u = path.empty() ? source_ : arcs_[path.back()].to;
    cursor_[u] = arcs_[cursor_[u]].next;
  }
}

double FlowNetwork::max_flow() {
  eps_ = 1e-12 * std::max(1.0, max_capacity_);
  double total = 0.0;
  while (build_levels()) {
    cursor_ = head_;
    total += push_blocking();
  }
  return total;
}

std::vector<char> FlowNetwork::source_side() const {
  std::vector<char> seen(head_.size(), 0);
  std::vector<int> stack{source_};
  seen[source_] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int a = head_[u]; a != -1; a = arcs_[a].next)
      if (arcs_[a].residual > eps_ && !seen[arcs_[a].to]) {
        seen[arcs_[a].to] = 1;
        stack.push_back(arcs_[a].to);
      }
  }
  return seen;
}

std::vector<char> FlowNetwork::sink_side() const {
  std::vector<char> seen(head_.size(), 0);
  std::vector<int> stack{sink_};
  seen[sink_] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    // u can reach v when the arc u->v (the reverse of a^1) has residual.
    for (int a = head_[v]; a != -1; a = arcs_[a].next) {
      const int u = arcs_[a].to;
      if (arcs_[a ^ 1].residual > eps_ && !seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace pmap
