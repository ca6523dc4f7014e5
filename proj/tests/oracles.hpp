// Test-only oracles, independent of the library's evaluation paths.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "hermex/hermite.hpp"
#include "hermex/multi_index.hpp"
#include "hermex/quadrature.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(int m) {
  BigInt f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

/// Closed-form Hermite coefficients, independent of the recurrence:
/// H_k(z) = sum_i (-1)^i k!/(i! (k-2i)!) (2z)^{k-2i}.
inline std::vector<BigInt> hermite_coeffs_closed_form(int k) {
  std::vector<BigInt> c(k + 1, BigInt(0));
  for (int i = 0; 2 * i <= k; ++i) {
    const int d = k - 2 * i;
    BigInt term = factorial(k) / (factorial(i) * factorial(d));
    term *= BigInt(1) << d;  // 2^d
    if (i % 2 == 1) term = -term;
    c[d] = term;
  }
  return c;
}

/// h_k(x) from exact polynomial coefficients:
/// (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}. Independent of the
/// normalized-recurrence path (shares only the integer coefficients). Horner
/// in long double: the alternating coefficients cancel ~4 digits at the
/// k = 30, |x| = 5 corner, which double cannot absorb at 1e-11 relative.
inline double hermite_fn_from_coeffs(int k, double x) {
  const auto coeffs = hermite_coeffs_closed_form(k);
  long double poly = 0.0L;
  for (int d = k; d >= 0; --d) poly = poly * x + static_cast<long double>(coeffs[d]);
  long double norm = std::sqrt((long double)std::numbers::pi);
  for (int i = 1; i <= k; ++i) norm *= 2.0L * i;
  return static_cast<double>(poly * std::exp(-0.5L * x * x) / std::sqrt(norm));
}

/// Brute-force projection kernel: explicit enumeration, one phi_alpha call
/// per index, plain summation.
inline double phi_k_bruteforce(int k, std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (const auto& alpha : hermex::multi_indices(n, k)) {
    total += hermex::phi_alpha(alpha, x) * hermex::phi_alpha(alpha, y);
  }
  return total;
}

/// Composition count by the recursion c(n,k) = sum_j c(n-1, k-j), a route
/// independent of the binomial formula.
inline std::uint64_t composition_count_recursive(int n, int k) {
  if (n == 1) return 1;
  std::uint64_t total = 0;
  for (int j = 0; j <= k; ++j) total += composition_count_recursive(n - 1, k - j);
  return total;
}

/// <f, h_k> on R by 256-node Gauss-Hermite with compensated weights.
template <typename F>
double hermite_inner_product_quadrature(F&& f, int k, int order = 256) {
  const auto& rule = hermex::gauss_hermite(order);
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    const double z = rule.nodes[i];
    total += rule.weights[i] * std::exp(z * z) * f(z) * hermite_fn_from_coeffs(k, z);
  }
  return total;
}

/// Deterministic uniform double in [lo, hi] (fixed mapping, no libstdc++
/// distribution dependence).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace oracle
