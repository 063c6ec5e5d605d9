#pragma once
// Deterministic counter-based randomness.
//
// All randomness in the project flows through SplitMix64 streams. A stream for
// logical unit k (trial index, replication index, ...) is derived as
//   state0 = mix64(mix64(seed) + k * GOLDEN)
// which makes streams independent of execution order: trial k draws the same
// numbers whether trials run sequentially, in parallel, or alone.

#include <cstdint>
#include <span>

namespace cno {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix64(seed) + stream_id * kGolden);
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1); never returns 0 so log() stays finite.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draws are produced in pairs.
  double next_gaussian();
  void fill_gaussian(std::span<double> out);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cno
