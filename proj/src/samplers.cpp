#include "pmap/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "pmap/detail/parallel.hpp"
#include "pmap/errors.hpp"

namespace pmap {

const char* to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::GUMBEL_FULL: return "gumbel-full";
    case SamplerKind::APPROX_UNARY: return "approx-unary";
    case SamplerKind::APPROX_PAIRWISE: return "approx-pairwise";
    case SamplerKind::UNBIASED: return "unbiased";
    case SamplerKind::GIBBS: return "gibbs";
    case SamplerKind::METROPOLIS: return "metropolis";
    case SamplerKind::EXACT: return "exact";
  }
  return "?";
}

const char* to_string(FamilyKind k) {
  return k == FamilyKind::EXACT_LSE ? "EXACT_LSE" : "GUMBEL_MC";
}

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::UPPER: return "UPPER";
    case BoundKind::LOWER_EXPECTED: return "LOWER_EXPECTED";
    case BoundKind::LOWER_PROBABLE: return "LOWER_PROBABLE";
    case BoundKind::EXACT: return "EXACT";
    case BoundKind::POINT: return "POINT";
  }
  return "?";
}

double chebyshev_tail(std::uint64_t m, double eps) {
  return std::numbers::pi * std::numbers::pi /
         (6.0 * static_cast<double>(m) * eps * eps);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

// --- exact Gumbel-max -------------------------------------------------------

GumbelMaxSampler::GumbelMaxSampler(const PairwiseModel& model, std::uint64_t cap)
    : domains_(model.domain_sizes()), energies_(energy_table(model, cap)) {
  if (std::all_of(energies_.begin(), energies_.end(),
                  [](double e) { return e == kNegInf; }))
    throw Infeasible("gumbel-max sampling: model is infeasible");
}

double GumbelMaxSampler::perturbed_max(Rng& rng) const {
  double best = kNegInf;
  for (double e : energies_)
    if (e != kNegInf) best = std::max(best, e + sample_gumbel(rng));
  return best;
}

Assignment GumbelMaxSampler::operator()(Rng& rng) const {
  double best = kNegInf;
  std::uint64_t arg = 0;
  for (std::size_t k = 0; k < energies_.size(); ++k) {
    if (energies_[k] == kNegInf) continue;
    const double v = energies_[k] + sample_gumbel(rng);
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  return assignment_from_index(domains_, arg);
}

Assignment gumbel_max_sample(const PairwiseModel& model, Rng& rng,
                             std::uint64_t cap) {
  return GumbelMaxSampler(model, cap)(rng);
}

BoundEstimate estimate_logz_full(const PairwiseModel& model, std::uint64_t m,
                                 const SeedPath& seed, double epsilon,
                                 std::uint64_t cap, unsigned workers) {
  if (m < 1) throw InvalidInput("estimate_logz_full: m must be >= 1");
  const GumbelMaxSampler sampler(model, cap);
  const auto maxima = detail::parallel_map<double>(m, workers, [&](std::size_t k) {
    Rng rng = seed.child(k).rng();
    return sampler.perturbed_max(rng);
  });
  const auto stats = detail::mean_and_se(maxima);
  BoundEstimate b;
  b.value = stats.mean;
  b.kind = BoundKind::POINT;
  b.samples = m;
  b.std_error = stats.std_error;
  b.analytic_std_error = kGumbelStdDev / std::sqrt(static_cast<double>(m));
  b.epsilon = epsilon;
  b.tail_probability = chebyshev_tail(m, epsilon);
  b.seed = seed;
  return b;
}

// --- approximate low-dimensional sampling -----------------------------------

Assignment approx_map_sample(const PairwiseModel& model, Scheme scheme,
                             SolverKind solver, Rng& rng) {
  if (scheme == Scheme::FULL)
    throw InvalidInput("approx_map_sample: use gumbel_max_sample for FULL");
  return solve_map(perturb(model, scheme, rng), solver).argmax;
}

SampleBatch approx_map_batch(const PairwiseModel& model, Scheme scheme,
                             SolverKind solver, std::uint64_t draws,
                             const SeedPath& seed, unsigned workers) {
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch batch;
  batch.sampler = scheme == Scheme::UNARY ? SamplerKind::APPROX_UNARY
                                          : SamplerKind::APPROX_PAIRWISE;
  batch.seed = seed;
  batch.samples = detail::parallel_map<Assignment>(draws, workers, [&](std::size_t k) {
    Rng rng = seed.child(k).rng();
    return approx_map_sample(model, scheme, solver, rng);
  });
  batch.wall_time = seconds_since(t0);
  return batch;
}

Assignment ExpandedModel::lift(std::span<const Label> x) const {
  Assignment out(origin.size());
  for (std::size_t c = 0; c < origin.size(); ++c) out[c] = x[origin[c]];
  return out;
}

Assignment ExpandedModel::project(std::span<const Label> x) const {
  Assignment out(copy_map.size());
  for (std::size_t i = 0; i < copy_map.size(); ++i) out[i] = x[copy_map[i].front()];
  return out;
}

ExpandedModel expand_tree(const PairwiseModel& model, Edge anchor, int m,
                          std::size_t max_vertices) {
  if (m < 1) throw InvalidInput("expand_tree: replication count must be >= 1");
  if (!is_forest(model)) throw CycleDetected("expand_tree: model is not a forest");
  int anchor_edge = -1;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto& ed = model.edge(e);
    if ((ed.u == anchor.u && ed.v == anchor.v) || (ed.u == anchor.v && ed.v == anchor.u))
      anchor_edge = e;
  }
  if (anchor_edge < 0) throw InvalidInput("expand_tree: anchor edge not in model");

  const int n = model.num_vertices();
  ExpandedModel out;
  out.anchor = anchor;
  out.copy_map.assign(n, {});
  ModelTables t;

  auto add_vertex = [&](int orig, double w) {
    const int id = static_cast<int>(t.domain_sizes.size());
    if (static_cast<std::size_t>(id) >= max_vertices)
      throw StateSpaceTooLarge("expand_tree: expansion exceeds " +
                               std::to_string(max_vertices) + " vertices");
    t.domain_sizes.push_back(model.domain_size(orig));
    std::vector<double> u(model.unary(orig).begin(), model.unary(orig).end());
    for (double& v : u) v *= w;
    t.unary.push_back(std::move(u));
    out.origin.push_back(orig);
    out.vertex_weight.push_back(w);
    out.copy_map[orig].push_back(id);
    return id;
  };
  // Copies keep the original edge orientation so the table is reused as is.
  auto add_edge = [&](int e, int orig_a, int copy_a, int copy_b, double w) {
    const auto& ed = model.edge(e);
    if (ed.u == orig_a) t.edges.push_back({copy_a, copy_b});
    else t.edges.push_back({copy_b, copy_a});
    std::vector<double> p(model.pairwise(e).begin(), model.pairwise(e).end());
    for (double& v : p) v *= w;
    t.pairwise.push_back(std::move(p));
    out.edge_origin.push_back(e);
    out.edge_weight.push_back(w);
  };

  std::vector<char> placed(n, 0);
  // Replicates the subtree of `orig` below `parent_orig` under `parent_copy`.
  auto expand = [&](auto&& self, int orig, int parent_orig, int parent_copy,
                    int edge, double w) -> void {
    placed[orig] = 1;
    const int c = add_vertex(orig, w);
    add_edge(edge, parent_orig, parent_copy, c, w);
    for (int e : model.incident()[orig]) {
      const auto& ed = model.edge(e);
      const int child = ed.u == orig ? ed.v : ed.u;
      if (child == parent_orig) continue;
      for (int k = 0; k < m; ++k) self(self, child, orig, c, e, w / m);
    }
  };

  const int r = anchor.u, s = anchor.v;
  placed[r] = placed[s] = 1;
  const int rc = add_vertex(r, 1.0);
  const int sc = add_vertex(s, 1.0);
  add_edge(anchor_edge, r, rc, sc, 1.0);
  for (auto [root, other, root_copy] : {std::tuple{r, s, rc}, std::tuple{s, r, sc}}) {
    for (int e : model.incident()[root]) {
      const auto& ed = model.edge(e);
      const int child = ed.u == root ? ed.v : ed.u;
      if (child == other) continue;
      for (int k = 0; k < m; ++k) expand(expand, child, root, root_copy, e, 1.0 / m);
    }
  }

  // Remaining components, unreplicated.
  std::vector<int> remap(n, -1);
  for (int v = 0; v < n; ++v)
    if (!placed[v]) remap[v] = add_vertex(v, 1.0);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto& ed = model.edge(e);
    if (remap[ed.u] >= 0) add_edge(e, ed.u, remap[ed.u], remap[ed.v], 1.0);
  }

  out.model = PairwiseModel(std::move(t), unchecked);
  return out;
}

PairwiseModel perturb_expanded(const ExpandedModel& expanded, Scheme scheme,
                               Rng& rng) {
  switch (scheme) {
    case Scheme::UNARY:
      return perturb_weighted(expanded.model, expanded.vertex_weight, {}, rng);
    case Scheme::PAIRWISE:
      return perturb_weighted(expanded.model, expanded.vertex_weight,
                              expanded.edge_weight, rng);
    case Scheme::FULL: break;
  }
  throw InvalidInput("perturb_expanded: FULL perturbation is not supported");
}

PairMarginalEstimate approx_pair_marginal(const PairwiseModel& model,
                                          Edge anchor, int m,
                                          std::uint64_t draws,
                                          const SeedPath& seed, Scheme scheme,
                                          unsigned workers) {
  if (draws < 1) throw InvalidInput("approx_pair_marginal: draws must be >= 1");
  PairMarginalEstimate est;
  est.draws = draws;
  const int subset[] = {anchor.u, anchor.v};
  std::vector<Assignment> pairs;
  if (is_forest(model)) {
    const ExpandedModel ex = expand_tree(model, anchor, m);
    est.replicas = m;
    const int rc = ex.copy_map[anchor.u].front(), sc = ex.copy_map[anchor.v].front();
    auto solved = detail::parallel_map<Assignment>(draws, workers, [&](std::size_t k) {
      Rng rng = seed.child(k).rng();
      const auto x = tree_map(perturb_expanded(ex, scheme, rng)).argmax;
      Assignment full(model.num_vertices(), 0);
      full[anchor.u] = x[rc];
      full[anchor.v] = x[sc];
      return full;
    });
    pairs = std::move(solved);
  } else {
    est.heuristic = true;
    est.replicas = 1;
    pairs = detail::parallel_map<Assignment>(draws, workers, [&](std::size_t k) {
      Rng rng = seed.child(k).rng();
      return approx_map_sample(model, scheme, SolverKind::AUTO, rng);
    });
  }
  est.table = empirical_marginal(model, subset, pairs);
  return est;
}

// --- self-reducible upper bounds --------------------------------------------

UpperBoundFamily::UpperBoundFamily(PairwiseModel model, std::vector<int> order,
                                   FamilyKind kind, std::uint64_t mc_samples,
                                   SeedPath seed, SolverKind solver,
                                   std::uint64_t cap, unsigned workers)
    : model_(std::move(model)),
      order_(std::move(order)),
      kind_(kind),
      mc_samples_(mc_samples),
      seed_(std::move(seed)),
      solver_(solver),
      cap_(cap),
      workers_(workers) {
  const int n = model_.num_vertices();
  if (order_.empty()) {
    order_.resize(n);
    for (int i = 0; i < n; ++i) order_[i] = i;
  }
  std::vector<char> seen(n, 0);
  if (static_cast<int>(order_.size()) != n)
    throw InvalidInput("bound family: order must list every vertex once");
  for (int v : order_) {
    if (v < 0 || v >= n || seen[v])
      throw InvalidInput("bound family: order must list every vertex once");
    seen[v] = 1;
  }
  if (kind_ == FamilyKind::GUMBEL_MC && mc_samples_ < 2)
    throw InvalidInput("bound family: GUMBEL_MC needs at least 2 samples");
  if (kind_ == FamilyKind::EXACT_LSE) require_state_space(model_, cap_);
}

double UpperBoundFamily::step_tolerance(double parent_se, double max_child_se) const {
  if (kind_ == FamilyKind::EXACT_LSE) return 1e-9;
  return 6.0 * std::sqrt(parent_se * parent_se + max_child_se * max_child_se);
}

FamilyValue UpperBoundFamily::evaluate(std::span<const Label> prefix) {
  std::vector<Label> key(prefix.begin(), prefix.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const FamilyValue v = compute(prefix);
  cache_.emplace(std::move(key), v);
  return v;
}

FamilyValue UpperBoundFamily::compute(std::span<const Label> prefix) const {
  const std::size_t j = prefix.size();
  if (j > order_.size()) throw InvalidInput("bound family: prefix too long");
  const std::span<const int> clamped(order_.data(), j);
  const ConditionedModel cond = condition(model_, clamped, prefix);
  FamilyValue out;
  out.std_error = 0.0;
  if (cond.offset == kNegInf) return out;
  if (cond.model.num_vertices() == 0) {
    out.value = cond.offset;
    return out;
  }
  if (kind_ == FamilyKind::EXACT_LSE) {
    out.value = cond.offset + log_partition(cond.model, cap_);
    return out;
  }

  try {
    (void)solve_map(cond.model, solver_, cap_);
  } catch (const Infeasible&) {
    return out;
  }
  SeedPath base = seed_.child(j);
  for (Label a : prefix) base = base.child(static_cast<std::uint64_t>(a));
  const auto maxima =
      detail::parallel_map<double>(mc_samples_, workers_, [&](std::size_t k) {
        Rng rng = base.child(k).rng();
        return solve_map(perturb_unary(cond.model, rng), solver_, cap_).value;
      });
  const auto stats = detail::mean_and_se(maxima);
  out.value = cond.offset + stats.mean;
  out.std_error = stats.std_error;
  return out;
}

UpperBoundFamily make_bound_family(const PairwiseModel& model,
                                   std::vector<int> order, FamilyKind kind,
                                   std::uint64_t mc_samples,
                                   const SeedPath& seed, SolverKind solver,
                                   std::uint64_t cap, unsigned workers) {
  return UpperBoundFamily(model, std::move(order), kind, mc_samples, seed,
                          solver, cap, workers);
}

namespace {

// Step distribution of Algorithm 1 below a prefix. Entries are divided by
// `scale` (> 1 only when the sum exceeds one).
struct Step {
  std::vector<double> p;
  double scale = 1.0;
  bool violation = false;  // excess beyond rounding
};

Step step_probabilities(UpperBoundFamily& family, std::vector<Label>& prefix,
                        const FamilyValue& prev, std::optional<double> tolerance) {
  const int j = static_cast<int>(prefix.size());
  const int d = family.model().domain_size(family.order()[j]);
  Step st;
  st.p.assign(d, 0.0);
  double total = 0.0, worst = kNegInf, child_se = 0.0;
  for (Label a = 0; a < d; ++a) {
    prefix.push_back(a);
    const FamilyValue u = family.evaluate(prefix);
    prefix.pop_back();
    if (u.value == kNegInf) continue;
    st.p[a] = std::exp(u.value - prev.value);
    worst = std::max(worst, u.value - prev.value);
    child_se = std::max(child_se, u.std_error);
    total += st.p[a];
  }
  const double tol = tolerance.value_or(family.step_tolerance(prev.std_error, child_se));
  if (worst > tol)
    throw NumericalError("unbiased sampling: step probability " + std::to_string(std::exp(worst)) +
                         " exceeds 1 at depth " + std::to_string(j));
  if (std::log(total) > tol)
    throw NumericalError("unbiased sampling: step probabilities sum to " +
                         std::to_string(total) + " at depth " + std::to_string(j));
  if (total > 1.0) {
    st.scale = total;
    st.violation = total > 1.0 + 1e-12;
  }
  return st;
}

}  // namespace

AttemptResult unbiased_attempt(UpperBoundFamily& family, Rng& rng,
                               std::optional<double> tolerance) {
  const int n = family.size();
  AttemptResult res;
  std::vector<Label> prefix;
  prefix.reserve(n);
  FamilyValue prev = family.evaluate(prefix);
  if (prev.value == kNegInf) throw Infeasible("unbiased sampling: model is infeasible");
  for (int j = 0; j < n; ++j) {
    const Step st = step_probabilities(family, prefix, prev, tolerance);
    const int d = static_cast<int>(st.p.size());
    if (st.violation) ++res.slack_violations;
    const double r = rng.uniform() * st.scale;
    double acc = 0.0;
    Label pick = -1;
    for (Label a = 0; a < d; ++a) {
      if (st.p[a] <= 0.0) continue;
      acc += st.p[a];
      if (r < acc) {
        pick = a;
        break;
      }
    }
    if (pick < 0 && st.scale > 1.0) {
      // r landed in the rounding gap above the last positive entry.
      for (Label a = d; a-- > 0;)
        if (st.p[a] > 0.0) {
          pick = a;
          break;
        }
    }
    if (pick < 0) return res;  // rejected
    res.log_path_probability += std::log(st.p[pick] / st.scale);
    prefix.push_back(pick);
    prev = family.evaluate(prefix);
  }
  res.accepted = true;
  res.x.assign(n, 0);
  for (int j = 0; j < n; ++j) res.x[family.order()[j]] = prefix[j];
  return res;
}

FamilyAcceptance exact_acceptance(UpperBoundFamily& family, std::uint64_t cap,
                                  std::optional<double> tolerance) {
  const PairwiseModel& model = family.model();
  require_state_space(model, cap);
  const int n = family.size();
  FamilyAcceptance out;
  out.joint.assign(state_space_size(model), 0.0);
  std::vector<Label> prefix;
  const FamilyValue u0 = family.evaluate(prefix);
  if (u0.value == kNegInf) throw Infeasible("exact_acceptance: model is infeasible");
  Assignment x(n, 0);
  auto walk = [&](auto&& self, const FamilyValue& prev, double mass) -> void {
    const int j = static_cast<int>(prefix.size());
    if (j == n) {
      for (int k = 0; k < n; ++k) x[family.order()[k]] = prefix[k];
      out.joint[assignment_index(model.domain_sizes(), x)] += mass;
      out.probability += mass;
      return;
    }
    const Step st = step_probabilities(family, prefix, prev, tolerance);
    if (st.violation) ++out.slack_violations;
    for (Label a = 0; a < static_cast<Label>(st.p.size()); ++a) {
      if (st.p[a] <= 0.0) continue;
      prefix.push_back(a);
      self(self, family.evaluate(prefix), mass * st.p[a] / st.scale);
      prefix.pop_back();
    }
  };
  walk(walk, u0, 1.0);
  return out;
}

UnbiasedResult unbiased_sample(UpperBoundFamily& family, Rng& rng,
                               std::uint64_t max_restarts,
                               std::optional<double> tolerance) {
  if (max_restarts < 1) throw InvalidInput("unbiased_sample: max_restarts must be >= 1");
  UnbiasedResult out;
  while (true) {
    AttemptResult a = unbiased_attempt(family, rng, tolerance);
    out.slack_violations += a.slack_violations;
    if (a.accepted) {
      out.x = std::move(a.x);
      out.log_path_probability = a.log_path_probability;
      return out;
    }
    if (++out.restarts >= max_restarts)
      throw RestartsExhausted("unbiased_sample: rejected " +
                              std::to_string(out.restarts) + " times");
  }
}

SampleBatch unbiased_batch(UpperBoundFamily& family, std::uint64_t draws,
                           const SeedPath& seed, std::uint64_t max_restarts) {
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch batch;
  batch.sampler = SamplerKind::UNBIASED;
  batch.seed = seed;
  Rng rng = seed.rng();
  for (std::uint64_t k = 0; k < draws; ++k) {
    auto r = unbiased_sample(family, rng, max_restarts);
    batch.restarts += r.restarts;
    batch.slack_violations += r.slack_violations;
    batch.samples.push_back(std::move(r.x));
  }
  batch.wall_time = seconds_since(t0);
  return batch;
}

AcceptanceEstimate binomial_estimate(std::uint64_t accepted, std::uint64_t trials) {
  AcceptanceEstimate e;
  e.trials = trials;
  e.accepted = accepted;
  if (trials == 0) return e;
  const double nt = static_cast<double>(trials);
  e.rate = static_cast<double>(accepted) / nt;
  e.std_error = std::sqrt(e.rate * (1.0 - e.rate) / nt);
  const double z = 3.0;
  const double denom = 1.0 + z * z / nt;
  const double center = (e.rate + z * z / (2.0 * nt)) / denom;
  const double half =
      z * std::sqrt(e.rate * (1.0 - e.rate) / nt + z * z / (4.0 * nt * nt)) / denom;
  e.ci_low = std::max(0.0, center - half);
  e.ci_high = std::min(1.0, center + half);
  return e;
}

AcceptanceEstimate acceptance_rate(UpperBoundFamily& family,
                                   std::uint64_t trials, Rng& rng) {
  if (trials < 1) throw InvalidInput("acceptance_rate: trials must be >= 1");
  std::uint64_t accepted = 0;
  for (std::uint64_t k = 0; k < trials; ++k)
    if (unbiased_attempt(family, rng).accepted) ++accepted;
  return binomial_estimate(accepted, trials);
}

}  // namespace pmap
