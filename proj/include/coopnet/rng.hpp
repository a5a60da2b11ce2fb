#pragma once
// Deterministic random number generation. Everything downstream of a seed must
// reproduce bit-exactly, including across chain-parallelism settings, so the
// engine (xoshiro256++) and every distribution are implemented here rather
// than taken from <random>, whose distributions are implementation-defined.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "coopnet/special.hpp"

namespace coopnet::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for chain/replicate `index` under one master seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x6A09E667F3BCC909ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s = splitmix64(s);
      w = s;
    }
    state_[0] |= 1;  // xoshiro state must not be all zero
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1]
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  bool flip() { return (next_u64() >> 63) != 0; }

  // Box-Muller; the paired deviate is cached as part of the stream state.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log(uniform_pos()); }

  // Marsaglia-Tsang squeeze for shape >= 1, boosted for shape < 1.
  double gamma(double shape, double rate) {
    if (shape <= 0 || rate <= 0)
      throw std::invalid_argument("gamma: shape and rate must be positive");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  double chi_square(double df) { return gamma(0.5 * df, 0.5); }

  double student_t(double df) { return normal() / std::sqrt(chi_square(df) / df); }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
  }

  long poisson(double lambda) {
    if (lambda < 0) throw std::invalid_argument("poisson: lambda must be nonnegative");
    if (lambda == 0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  long poisson_inversion(double lambda) {
    const double u = uniform();
    double p = std::exp(-lambda);
    double cum = p;
    long k = 0;
    while (u > cum && k < 1000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
    }
    return k;
  }

  // Hormann's PTRS transformed-rejection sampler, valid for lambda >= 10.
  long poisson_ptrs(double lambda) {
    const double log_lambda = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double k = kf;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_lambda - lambda - special::log_gamma(k + 1.0))
        return static_cast<long>(kf);
    }
  }

  std::uint64_t state_[4];
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace coopnet::rng
