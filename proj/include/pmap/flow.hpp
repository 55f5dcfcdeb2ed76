#pragma once

#include <vector>

namespace pmap {

/// Directed network with non-negative capacities, solved by Dinic's
/// blocking-flow algorithm over BFS level graphs.
class FlowNetwork {
 public:
  FlowNetwork(int num_nodes, int source, int sink);

  /// Adds an arc and its zero-capacity reverse; returns the arc id.
  int add_arc(int from, int to, double capacity);

  /// Computes a maximum flow; returns its value.
  double max_flow();

  /// Nodes reachable from the source in the residual graph (after max_flow).
  std::vector<char> source_side() const;

  /// Nodes that can reach the sink in the residual graph (after max_flow).
  std::vector<char> sink_side() const;

  int num_nodes() const { return static_cast<int>(head_.size()); }
  int source() const { return source_; }
  int sink() const { return sink_; }
  double flow_on(int arc) const { return arcs_[arc ^ 1].residual; }

 private:
  struct Arc {
    int to;
    int next;
    double residual;
  };

  bool build_levels();
  double push_blocking();

  int source_;
  int sink_;
  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> cursor_;
  double eps_ = 0.0;
  double max_capacity_ = 0.0;
};

}  // namespace pmap
