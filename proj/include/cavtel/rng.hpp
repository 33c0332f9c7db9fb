#pragma once
// Deterministic per-trajectory random streams (xoshiro256++ seeded through
// splitmix64).  A stream is a pure function of (seed, stream index), so
// Monte Carlo results do not depend on scheduling or worker count.

#include <cmath>
#include <cstdint>

namespace cavtel {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (stream * 0x9E3779B97F4A7C15ull) ^
                      (stream + 0x632BE59BD9B4E019ull);
    for (auto& w : s_) w = splitmix(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_oc() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Knuth sampler; adequate for the small means used here (dark counts).
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    double p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= uniform_oc();
    } while (p > limit);
    return k - 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
};

}  // namespace cavtel
