#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace meshqos {

// Deterministic random source for simulation runs.
//
// The engine is mt19937_64, whose output sequence is pinned by the C++
// standard, and every distribution below is implemented here instead of
// relying on std:: distribution objects, whose draw sequences differ
// between standard library implementations. Identical (seed, call
// sequence) therefore yields identical results on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], both inclusive. Rejection sampling keeps
  // the draw unbiased without platform-dependent tricks.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // Index drawn proportionally to the (non-negative) weights.
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double r = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (r < acc) return i;
    }
    return weights.size() - 1;  // r landed on the rounding edge
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a run seed with a purpose tag so that independent random streams
// (per-flow traffic, radio events) never share state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the salt
  for (unsigned char c : salt) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace meshqos
