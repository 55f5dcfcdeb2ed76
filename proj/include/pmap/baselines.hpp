#pragma once

// Single-site MCMC reference samplers.

#include <cstdint>
#include <vector>

#include "pmap/model.hpp"
#include "pmap/rng.hpp"
#include "pmap/samplers.hpp"

namespace pmap {

enum class ChainInit { RANDOM, MAP, FIXED };

struct ChainConfig {
  std::uint64_t sweeps = 1000;
  /// Unset means sweeps / 10.
  std::optional<std::uint64_t> burn_in;
  std::uint64_t thin = 1;
  ChainInit init = ChainInit::RANDOM;
  Assignment fixed;  // used when init == FIXED
  /// One sweep = n updates at uniformly drawn sites instead of 0..n-1.
  bool random_scan = false;

  std::uint64_t effective_burn_in() const { return burn_in.value_or(sweeps / 10); }
};

/// Throws InvalidInput unless sweeps > burn_in and thin >= 1.
void check_chain_config(const ChainConfig& cfg);

/// Emits the state after sweep t for every t in (burn_in, sweeps] with
/// (t - burn_in) % thin == 0. Throws Infeasible when the initial state has
/// energy -inf.
SampleBatch gibbs_chain(const PairwiseModel& model, const ChainConfig& cfg, Rng& rng);

/// Uniform proposal over the other labels of one site, accepted with
/// probability min(1, exp(delta theta)).
SampleBatch metropolis_chain(const PairwiseModel& model, const ChainConfig& cfg,
                             Rng& rng);

/// `chains` independent chains (chain k uses seed.child(k)), concatenated in
/// chain order. kind is GIBBS or METROPOLIS.
SampleBatch run_chains(const PairwiseModel& model, SamplerKind kind,
                       const ChainConfig& cfg, std::uint64_t chains,
                       const SeedPath& seed, unsigned workers = 1);

/// Advances x by `sweeps` full sweeps without recording; for invariance tests.
void gibbs_sweeps(const PairwiseModel& model, Assignment& x, std::uint64_t sweeps,
                  Rng& rng, bool random_scan = false);
void metropolis_sweeps(const PairwiseModel& model, Assignment& x,
                       std::uint64_t sweeps, Rng& rng, bool random_scan = false);

}  // namespace pmap
