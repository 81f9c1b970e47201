#pragma once

#include <cstdint>

namespace scale {

// SplitMix64: state advances by the golden-ratio increment 0x9E3779B97F4A7C15
// and each output is the standard three-step mix of the new state. Every
// derived draw below is built from next_u64() with integer or IEEE-exact
// arithmetic plus std::log/sqrt/cos, so a seed reproduces the same stream on
// any conforming platform.
//
// Single owner. Use split() to hand independent streams to workers.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, n). Rejection sampling, so no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  // Seed of an independent stream keyed by `stream`. Does not advance *this.
  std::uint64_t split(std::uint64_t stream) const;

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// One SplitMix64 finalizer round; used for deriving sub-seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace scale
