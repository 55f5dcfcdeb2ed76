#pragma once

// Goodness-of-fit helpers and a naive brute-force reference used by tests.

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pmap/model.hpp"

namespace pmap::test {

/// Pearson chi-square p-value; adjacent cells are pooled until each expected
/// count is >= 5.
inline double chi_square_p(std::span<const std::uint64_t> observed,
                           std::span<const double> probs) {
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  std::vector<double> obs, expect;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    o_acc += static_cast<double>(observed[k]);
    e_acc += probs[k] * n;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expect.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (expect.empty()) return 1.0;
    obs.back() += o_acc;
    expect.back() += e_acc;
  }
  if (expect.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k)
    stat += (obs[k] - expect[k]) * (obs[k] - expect[k]) / expect[k];
  const double dof = static_cast<double>(obs.size() - 1);
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

/// Asymptotic one-sample Kolmogorov-Smirnov p-value.
inline double ks_p(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

/// theta(x) straight from the tables, no shared code with the library.
inline double naive_energy(const ModelTables& t, const std::vector<int>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += t.unary[i][x[i]];
  for (std::size_t e = 0; e < t.edges.size(); ++e)
    s += t.pairwise[e][x[t.edges[e].u] * t.domain_sizes[t.edges[e].v] + x[t.edges[e].v]];
  return s;
}

/// Calls fn(x) for every configuration, last vertex varying fastest.
inline void naive_enumerate(const std::vector<int>& domains,
                            const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> x(domains.size(), 0);
  while (true) {
    fn(x);
    int i = static_cast<int>(domains.size()) - 1;
    while (i >= 0 && ++x[i] == domains[i]) x[i--] = 0;
    if (i < 0) return;
  }
}

/// log Z by max-shifted summation over a materialized table.
inline double naive_log_z(const PairwiseModel& m) {
  std::vector<double> es;
  naive_enumerate(m.domain_sizes(),
                  [&](const std::vector<int>& x) { es.push_back(naive_energy(m.tables(), x)); });
  const double top = *std::max_element(es.begin(), es.end());
  if (top == -INFINITY) return -INFINITY;
  double s = 0.0;
  for (double e : es) s += std::exp(e - top);
  return top + std::log(s);
}

/// Normalized probabilities in naive_enumerate order.
inline std::vector<double> naive_distribution(const PairwiseModel& m) {
  std::vector<double> es;
  naive_enumerate(m.domain_sizes(),
                  [&](const std::vector<int>& x) { es.push_back(naive_energy(m.tables(), x)); });
  const double lz = naive_log_z(m);
  for (double& e : es) e = std::exp(e - lz);
  return es;
}

/// Index of x in naive_enumerate order.
inline std::size_t naive_index(const std::vector<int>& domains, const std::vector<int>& x) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) k = k * domains[i] + x[i];
  return k;
}

}  // namespace pmap::test
