#pragma once

#include <algorithm>
#include <vector>

#include "pmap/model.hpp"

namespace pmap::detail {

/// Visits every configuration in index order, calling fn(x, theta(x)).
///
/// Edge terms are attributed to their larger endpoint, so a prefix sum over
/// vertices only needs recomputing from the most significant changed digit.
template <class Fn>
void for_each_energy(const PairwiseModel& model, Fn&& fn) {
  const int n = model.num_vertices();
  std::vector<std::vector<int>> owned(n);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto& ed = model.edge(e);
    owned[std::max(ed.u, ed.v)].push_back(e);
  }
  auto contrib = [&](int i, const Assignment& x) {
    double s = model.unary(i, x[i]);
    for (int e : owned[i]) {
      const auto& ed = model.edge(e);
      s += model.pairwise(e, x[ed.u], x[ed.v]);
    }
    return s;
  };

  Assignment x(n, 0);
  std::vector<double> prefix(n + 1, 0.0);
  int from = 0;
  while (true) {
    for (int i = from; i < n; ++i) prefix[i + 1] = prefix[i] + contrib(i, x);
    fn(static_cast<const Assignment&>(x), prefix[n]);
    int k = n - 1;
    while (k >= 0 && x[k] + 1 == model.domain_size(k)) {
      x[k] = 0;
      --k;
    }
    if (k < 0) return;
    ++x[k];
    from = k;
  }
}

}  // namespace pmap::detail
