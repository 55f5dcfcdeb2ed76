#pragma once

// Portable counter-based random streams.
//
// Every stream is Philox4x32-10 keyed by the 64-bit root seed. The 128-bit
// counter is split into a 64-bit stream id (high half) and a 64-bit block
// index (low half). The stream id of a SeedPath is obtained by folding the
// path indices through the SplitMix64 finalizer:
//
//   id = 0
//   for p in path: id = splitmix64(id ^ splitmix64(p + 1))
//
// Results therefore depend only on (root seed, path) and never on thread
// scheduling or platform.

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace pmap {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Philox4x32 with 10 rounds (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// A single Philox stream. Models UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t key, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on the open interval (0,1); 0 and 1 are never returned.
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Number of 64-bit outputs consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  std::uint64_t draws_ = 0;
};

/// Root seed plus a derivation path; names one independent noise stream.
struct SeedPath {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  SeedPath() = default;
  explicit SeedPath(std::uint64_t root_seed) : root(root_seed) {}
  SeedPath(std::uint64_t root_seed, std::vector<std::uint64_t> p)
      : root(root_seed), path(std::move(p)) {}

  SeedPath child(std::uint64_t index) const;
  std::uint64_t stream_id() const;
  Rng rng() const { return Rng(root, stream_id()); }
  std::string to_string() const;

  friend bool operator==(const SeedPath&, const SeedPath&) = default;
};

/// Root seed from the PMAP_SEED environment variable, if set and numeric.
bool seed_from_env(std::uint64_t& out);

inline constexpr const char* kSeedEnvVar = "PMAP_SEED";

}  // namespace pmap
