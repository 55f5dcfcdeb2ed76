#include "pmap/exact.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pmap/detail/enumerate.hpp"
#include "pmap/errors.hpp"

namespace pmap {

void require_state_space(const PairwiseModel& model, std::uint64_t cap) {
  const std::uint64_t size = state_space_size(model);
  if (size > cap)
    throw StateSpaceTooLarge("state space of " +
                             (size == UINT64_MAX ? std::string(">2^64")
                                                 : std::to_string(size)) +
                             " configurations exceeds the cap of " +
                             std::to_string(cap));
}

std::uint64_t assignment_index(std::span<const int> domains,
                               std::span<const Label> x) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < domains.size(); ++i)
    idx = idx * static_cast<std::uint64_t>(domains[i]) +
          static_cast<std::uint64_t>(x[i]);
  return idx;
}

Assignment assignment_from_index(std::span<const int> domains,
                                 std::uint64_t index) {
  Assignment x(domains.size());
  for (std::size_t k = domains.size(); k-- > 0;) {
    x[k] = static_cast<Label>(index % static_cast<std::uint64_t>(domains[k]));
    index /= static_cast<std::uint64_t>(domains[k]);
  }
  return x;
}

std::vector<double> energy_table(const PairwiseModel& model, std::uint64_t cap) {
  require_state_space(model, cap);
  std::vector<double> out;
  out.reserve(state_space_size(model));
  detail::for_each_energy(model, [&](const Assignment&, double e) { out.push_back(e); });
  return out;
}

double log_partition(const PairwiseModel& model, std::uint64_t cap) {
  require_state_space(model, cap);
  double m = kNegInf;
  double s = 0.0;
  detail::for_each_energy(model, [&](const Assignment&, double e) {
    if (e == kNegInf) return;
    if (e <= m) {
      s += std::exp(e - m);
    } else {
      s = s * std::exp(m - e) + 1.0;
      m = e;
    }
  });
  if (m == kNegInf) return kNegInf;
  return m + std::log(s);
}

std::vector<double> joint_distribution(const PairwiseModel& model,
                                       std::uint64_t cap) {
  std::vector<double> e = energy_table(model, cap);
  const double mx = *std::max_element(e.begin(), e.end());
  if (mx == kNegInf) throw Infeasible("model is infeasible");
  double s = 0.0;
  for (double& v : e) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : e) v /= s;
  return e;
}

double MarginalTable::at(std::span<const Label> labels) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < shape.size(); ++k)
    idx = idx * static_cast<std::size_t>(shape[k]) + static_cast<std::size_t>(labels[k]);
  return probs[idx];
}

namespace {

MarginalTable empty_table(const PairwiseModel& model,
                          std::span<const int> subset) {
  MarginalTable t;
  std::set<int> seen;
  std::size_t size = 1;
  for (int v : subset) {
    if (v < 0 || v >= model.num_vertices())
      throw InvalidInput("marginal: vertex " + std::to_string(v) + " out of range");
    if (!seen.insert(v).second)
      throw InvalidInput("marginal: duplicate vertex " + std::to_string(v));
    t.subset.push_back(v);
    t.shape.push_back(model.domain_size(v));
    size *= static_cast<std::size_t>(model.domain_size(v));
  }
  t.probs.assign(size, 0.0);
  return t;
}

std::size_t cell(const MarginalTable& t, const Assignment& x) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < t.subset.size(); ++k)
    idx = idx * static_cast<std::size_t>(t.shape[k]) +
          static_cast<std::size_t>(x[t.subset[k]]);
  return idx;
}

}  // namespace

MarginalTable marginal(const PairwiseModel& model, std::span<const int> subset,
                       std::uint64_t cap) {
  MarginalTable t = empty_table(model, subset);
  const double log_z = log_partition(model, cap);
  if (log_z == kNegInf) throw Infeasible("model is infeasible");
  detail::for_each_energy(model, [&](const Assignment& x, double e) {
    if (e != kNegInf) t.probs[cell(t, x)] += std::exp(e - log_z);
  });
  double s = 0.0;
  for (double p : t.probs) s += p;
  for (double& p : t.probs) p /= s;
  return t;
}

std::vector<MarginalTable> vertex_marginals(const PairwiseModel& model,
                                            std::uint64_t cap) {
  const double log_z = log_partition(model, cap);
  if (log_z == kNegInf) throw Infeasible("model is infeasible");
  std::vector<MarginalTable> out;
  for (int i = 0; i < model.num_vertices(); ++i) {
    const int v[] = {i};
    out.push_back(empty_table(model, v));
  }
  detail::for_each_energy(model, [&](const Assignment& x, double e) {
    if (e == kNegInf) return;
    const double p = std::exp(e - log_z);
    for (int i = 0; i < model.num_vertices(); ++i) out[i].probs[x[i]] += p;
  });
  for (auto& t : out) {
    double s = 0.0;
    for (double p : t.probs) s += p;
    for (double& p : t.probs) p /= s;
  }
  return out;
}

MarginalTable empirical_marginal(const PairwiseModel& model,
                                 std::span<const int> subset,
                                 std::span<const Assignment> samples) {
  MarginalTable t = empty_table(model, subset);
  if (samples.empty()) throw InvalidInput("empirical_marginal: no samples");
  for (const auto& x : samples) t.probs[cell(t, x)] += 1.0;
  for (double& p : t.probs) p /= static_cast<double>(samples.size());
  return t;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidInput("total_variation: tables differ in size");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

double total_variation(const MarginalTable& p, const MarginalTable& q) {
  if (p.shape != q.shape)
    throw InvalidInput("total_variation: tables differ in shape");
  return total_variation(std::span<const double>(p.probs),
                         std::span<const double>(q.probs));
}

double mean_vertex_tv(const std::vector<MarginalTable>& p,
                      const std::vector<MarginalTable>& q) {
  if (p.size() != q.size() || p.empty())
    throw InvalidInput("mean_vertex_tv: marginal lists differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += total_variation(p[i], q[i]);
  return s / static_cast<double>(p.size());
}

ExactSampler::ExactSampler(const PairwiseModel& model, std::uint64_t cap)
    : domains_(model.domain_sizes()) {
  log_z_ = log_partition(model, cap);
  probs_ = joint_distribution(model, cap);
  const std::size_t n = domains_.size();
  stride_.assign(n + 1, 1);
  for (std::size_t k = n; k-- > 0;)
    stride_[k] = stride_[k + 1] * static_cast<std::uint64_t>(domains_[k]);
  cumulative_.assign(probs_.size() + 1, 0.0);
  for (std::size_t k = 0; k < probs_.size(); ++k)
    cumulative_[k + 1] = cumulative_[k] + probs_[k];
}

Assignment ExactSampler::operator()(Rng& rng) const {
  const std::size_t n = domains_.size();
  Assignment x(n);
  std::uint64_t lo = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t child = stride_[j + 1];
    const double base = cumulative_[lo];
    const double mass = cumulative_[lo + stride_[j]] - base;
    const double target = rng.uniform() * mass;
    Label pick = domains_[j] - 1;
    for (Label a = 0; a + 1 < domains_[j]; ++a) {
      const double upto = cumulative_[lo + (a + 1) * child] - base;
      if (target < upto) {
        pick = a;
        break;
      }
    }
    // Skip zero-mass children that rounding could land on.
    while (pick > 0 && cumulative_[lo + (pick + 1) * child] ==
                           cumulative_[lo + pick * child])
      --pick;
    x[j] = pick;
    lo += static_cast<std::uint64_t>(pick) * child;
  }
  return x;
}

Assignment exact_sample(const PairwiseModel& model, Rng& rng, std::uint64_t cap) {
  return ExactSampler(model, cap)(rng);
}

}  // namespace pmap
