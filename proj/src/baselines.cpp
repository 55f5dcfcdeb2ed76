#include "pmap/baselines.hpp"

#include <chrono>
#include <cmath>

#include "pmap/detail/parallel.hpp"
#include "pmap/errors.hpp"
#include "pmap/map_solvers.hpp"

namespace pmap {

namespace {

// theta terms of vertex i at label a, other sites held at x.
double local_energy(const PairwiseModel& model, const Assignment& x, int i, Label a) {
  double s = model.unary(i, a);
  for (int e : model.incident()[i]) {
    const auto [u, v] = model.edge(e);
    s += (u == i) ? model.pairwise(e, a, x[v]) : model.pairwise(e, x[u], a);
  }
  return s;
}

void gibbs_update(const PairwiseModel& model, Assignment& x, int i, Rng& rng,
                  std::vector<double>& w) {
  const int d = model.domain_size(i);
  if (d == 1) return;
  w.resize(d);
  double top = kNegInf;
  for (int a = 0; a < d; ++a) {
    w[a] = local_energy(model, x, i, a);
    top = std::max(top, w[a]);
  }
  double total = 0.0;
  for (int a = 0; a < d; ++a) {
    w[a] = (w[a] == kNegInf) ? 0.0 : std::exp(w[a] - top);
    total += w[a];
  }
  double r = rng.uniform() * total;
  int pick = d - 1;
  for (int a = 0; a < d; ++a) {
    if (r < w[a]) {
      pick = a;
      break;
    }
    r -= w[a];
  }
  while (w[pick] == 0.0) --pick;  // rounding fell past the last positive weight
  x[i] = pick;
}

void metropolis_update(const PairwiseModel& model, Assignment& x, int i, Rng& rng) {
  const int d = model.domain_size(i);
  if (d == 1) return;
  Label proposal = static_cast<Label>(rng.below(d - 1));
  if (proposal >= x[i]) ++proposal;
  const double delta =
      local_energy(model, x, i, proposal) - local_energy(model, x, i, x[i]);
  const double u = rng.uniform();
  if (delta >= 0.0 || u < std::exp(delta)) x[i] = proposal;
}

template <class Update>
void sweep(const PairwiseModel& model, Rng& rng, bool random_scan, Update&& update) {
  const int n = model.num_vertices();
  for (int k = 0; k < n; ++k) {
    const int i = random_scan ? static_cast<int>(rng.below(n)) : k;
    update(i);
  }
}

Assignment initial_state(const PairwiseModel& model, const ChainConfig& cfg, Rng& rng) {
  Assignment x;
  switch (cfg.init) {
    case ChainInit::FIXED:
      check_assignment(model, cfg.fixed);
      x = cfg.fixed;
      break;
    case ChainInit::MAP:
      x = solve_map(model).argmax;
      break;
    case ChainInit::RANDOM:
      x.resize(model.num_vertices());
      for (int i = 0; i < model.num_vertices(); ++i)
        x[i] = static_cast<Label>(rng.below(model.domain_size(i)));
      break;
  }
  if (energy(model, x) == kNegInf)
    throw Infeasible("chain: initial state has zero probability");
  return x;
}

template <class Update>
SampleBatch run_chain(const PairwiseModel& model, const ChainConfig& cfg, Rng& rng,
                      SamplerKind kind, Update&& update) {
  check_chain_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  SampleBatch batch;
  batch.sampler = kind;
  Assignment x = initial_state(model, cfg, rng);
  const std::uint64_t burn = cfg.effective_burn_in();
  batch.samples.reserve((cfg.sweeps - burn) / cfg.thin);
  for (std::uint64_t t = 1; t <= cfg.sweeps; ++t) {
    sweep(model, rng, cfg.random_scan, [&](int i) { update(x, i); });
    if (t > burn && (t - burn) % cfg.thin == 0) batch.samples.push_back(x);
  }
  batch.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

}  // namespace

void check_chain_config(const ChainConfig& cfg) {
  if (cfg.thin < 1) throw InvalidInput("chain: thin must be >= 1");
  if (cfg.sweeps <= cfg.effective_burn_in())
    throw InvalidInput("chain: sweeps must exceed burn_in");
}

SampleBatch gibbs_chain(const PairwiseModel& model, const ChainConfig& cfg, Rng& rng) {
  std::vector<double> w;
  return run_chain(model, cfg, rng, SamplerKind::GIBBS,
                   [&](Assignment& x, int i) { gibbs_update(model, x, i, rng, w); });
}

SampleBatch metropolis_chain(const PairwiseModel& model, const ChainConfig& cfg,
                             Rng& rng) {
  return run_chain(model, cfg, rng, SamplerKind::METROPOLIS,
                   [&](Assignment& x, int i) { metropolis_update(model, x, i, rng); });
}

SampleBatch run_chains(const PairwiseModel& model, SamplerKind kind,
                       const ChainConfig& cfg, std::uint64_t chains,
                       const SeedPath& seed, unsigned workers) {
  if (kind != SamplerKind::GIBBS && kind != SamplerKind::METROPOLIS)
    throw InvalidInput("run_chains: sampler must be gibbs or metropolis");
  check_chain_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  auto parts = detail::parallel_map<SampleBatch>(chains, workers, [&](std::size_t k) {
    Rng rng = seed.child(k).rng();
    return kind == SamplerKind::GIBBS ? gibbs_chain(model, cfg, rng)
                                      : metropolis_chain(model, cfg, rng);
  });
  SampleBatch out;
  out.sampler = kind;
  out.seed = seed;
  for (auto& p : parts)
    out.samples.insert(out.samples.end(), std::make_move_iterator(p.samples.begin()),
                       std::make_move_iterator(p.samples.end()));
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void gibbs_sweeps(const PairwiseModel& model, Assignment& x, std::uint64_t sweeps,
                  Rng& rng, bool random_scan) {
  std::vector<double> w;
  for (std::uint64_t t = 0; t < sweeps; ++t)
    sweep(model, rng, random_scan, [&](int i) { gibbs_update(model, x, i, rng, w); });
}

void metropolis_sweeps(const PairwiseModel& model, Assignment& x,
                       std::uint64_t sweeps, Rng& rng, bool random_scan) {
  for (std::uint64_t t = 0; t < sweeps; ++t)
    sweep(model, rng, random_scan, [&](int i) { metropolis_update(model, x, i, rng); });
}

}  // namespace pmap
