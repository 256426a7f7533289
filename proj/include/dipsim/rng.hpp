#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dipsim {

// splitmix64 finalizer; used for counter-based seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// k-th child seed of a master seed. Counter-based, so any worker can derive
// its stream without touching shared state; identical (master, k) always
// yields the identical stream.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t k) {
  return splitmix64(master + (k + 1) * 0x9E3779B97F4A7C15ull);
}

// Deterministic random source. mt19937_64 has a standard-specified sequence,
// and the distributions below are hand-specified (std:: distributions are
// implementation-defined), so a (seed, call sequence) pair replays exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t bound = (UINT64_MAX / n) * n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= bound);
    return x % n;
  }

  // Standard normal via the polar (Marsaglia) method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dipsim
