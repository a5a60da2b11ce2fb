#pragma once
// Scalar special functions used by the likelihoods and diagnostics.
// Self-contained (no libm gamma-family calls) so results are identical across
// libm versions and safe to evaluate from concurrent chains.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coopnet::special {

template <typename T>
T log1p_exp(T x) {
  // log(1 + e^x) without overflow
  if (x > T(0)) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

template <typename T>
T inv_logit(T x) {
  if (x >= T(0)) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// log F(x) for the logistic CDF F
template <typename T>
T log_inv_logit(T x) {
  return -log1p_exp(-x);
}

template <typename T>
T log_sum_exp(T a, T b) {
  if (a == -std::numeric_limits<T>::infinity()) return b;
  if (b == -std::numeric_limits<T>::infinity()) return a;
  const T m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log(1 - e^a) for a < 0
template <typename T>
T log1m_exp(T a) {
  if (a >= T(0)) return std::numeric_limits<T>::quiet_NaN();
  if (a > T(-0.693147180559945309)) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

// Lanczos (g = 7, 9 terms), positive arguments only.
inline double log_gamma(double x) {
  if (!(x > 0))
    throw std::invalid_argument("log_gamma: argument must be positive");
  static constexpr double kCoeff[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  const double z = x - 1.0;
  double a = kCoeff[0];
  for (int i = 1; i < 9; ++i) a += kCoeff[i] / (z + i);
  const double t = z + 7.5;
  return 0.91893853320467274178 + (z + 0.5) * std::log(t) - t + std::log(a);
}

template <typename T>
T digamma(T x) {
  if (!(x > T(0)))
    throw std::invalid_argument("digamma: argument must be positive");
  T result = T(0);
  while (x < T(15)) {
    result -= T(1) / x;
    x += T(1);
  }
  // asymptotic expansion, error O(x^-10) for x >= 15
  const T inv = T(1) / x;
  const T inv2 = inv * inv;
  result += std::log(x) - T(0.5) * inv -
            inv2 * (T(1) / T(12) - inv2 * (T(1) / T(120) - inv2 * (T(1) / T(252) - inv2 / T(240))));
  return result;
}

template <typename T>
T trigamma(T x) {
  if (!(x > T(0)))
    throw std::invalid_argument("trigamma: argument must be positive");
  T result = T(0);
  while (x < T(15)) {
    result += T(1) / (x * x);
    x += T(1);
  }
  const T inv = T(1) / x;
  const T inv2 = inv * inv;
  result += inv * (T(1) + T(0.5) * inv +
                   inv2 * (T(1) / T(6) - inv2 * (T(1) / T(30) - inv2 * (T(1) / T(42) - inv2 / T(30)))));
  return result;
}

}  // namespace coopnet::special
