// Deterministic random number generation for the Monte Carlo workers.
// mt19937_64 is fully specified by the standard; the uniform and gaussian
// transforms below are hand-rolled so that a (seed, shape) pair reproduces the
// same realization everywhere, independent of the standard library build.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ais {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Decorrelated per-trial stream seed derived from a base seed.
inline uint64_t trial_seed(uint64_t base, uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 1));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    return std::min<uint64_t>(uint64_t(uniform() * double(n)), n - 1);
  }

  // Standard normal via Box-Muller, pair cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Poisson draw by inversion, chunked so the reference product never
  // underflows for large means.
  uint64_t poisson(double mean) {
    uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = std::min(mean, 400.0);
      const double limit = std::exp(-chunk);
      double prod = uniform();
      while (prod >= limit) {
        ++total;
        prod *= uniform();
      }
      mean -= chunk;
    }
    return total;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ais
