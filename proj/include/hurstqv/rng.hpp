#pragma once

#include <cmath>
#include <cstdint>

namespace hurstqv {

/// splitmix64 finalizer: bijective 64-bit mix.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based uniform generator: the splitmix64 stream. Output i is a pure
/// function of (seed, i), so sequences are reproducible across builds on one
/// platform and independent per seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Standard normal stream via the Marsaglia polar method on top of SplitMix64.
/// Consumes uniforms sequentially; deterministic for a fixed seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.next_uniform() - 1.0;
      v = 2.0 * rng_.next_uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  SplitMix64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and up to three
/// coordinates (e.g. grid index, parameter index, replication index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = splitmix64_mix(base ^ 0xD1B54A32D192ED03ULL);
  s = splitmix64_mix(s ^ (a + 0x9E3779B97F4A7C15ULL));
  s = splitmix64_mix(s ^ (b + 0x8CB92BA72F3D8DD7ULL));
  s = splitmix64_mix(s ^ (c + 0xDA942042E4DD58B5ULL));
  return s;
}

}  // namespace hurstqv
