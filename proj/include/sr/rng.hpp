#pragma once

#include <cmath>
#include <cstdint>

namespace sr {

// Deterministic splitmix64 stream. We roll our own generator instead of
// <random> so that draws are bit-identical across standard libraries and
// so that per-draw streams can be derived from (seed, tag, index) without
// sharing state between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller, one spare cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Mixes (master, a, b) into an independent stream seed. Draw i of agent j
// gets stream seed_stream(master, j, i); the resulting ensembles do not
// depend on simulation order.
inline std::uint64_t seed_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  Rng mix(master ^ (a * 0xD6E8FEB86659FD93ULL) ^ (b * 0xA5CB3F1D3C93E1ABULL) ^ 0x6A09E667F3BCC908ULL);
  mix.next_u64();
  return mix.next_u64();
}

}  // namespace sr
