#pragma once

#include <cstdint>
#include <string_view>

namespace hetvar {

/// SplitMix64 step; the standard 64-bit finalizer-based generator used
/// here only to mix seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// FNV-1a over bytes, for hashing canonical scenario keys into seeds.
std::uint64_t fnv1a64(std::string_view bytes);

/// Stream seed derived from (master seed, key hash, index); independent
/// of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key_hash, std::uint64_t index);

/// Deterministic generator with explicitly specified distributions, so
/// output sequences do not depend on the standard library's
/// implementation-defined distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// uniform on (0, 1]
  double uniform();
  /// standard normal via Box-Muller (two uniforms per draw)
  double normal();
  /// Bernoulli-counting binomial draw, O(n)
  int binomial(int n, double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace hetvar
