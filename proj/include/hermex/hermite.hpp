#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/multi_index.hpp"

namespace hermex {

using BigInt = boost::multiprecision::cpp_int;

/// Largest degree with exact integer polynomial coefficients. Beyond this
/// only the recurrence evaluation path is available.
inline constexpr int kMaxExactHermiteDegree = 64;

/// Uniform bound on |h_k(x)| (Cramer-type), used as a sanity clamp.
inline constexpr double kHermiteUniformBound = 0.816;

/// Coefficients of the physicists' Hermite polynomial H_k, ascending powers
/// (coeffs[i] multiplies z^i, leading coefficient 2^k). Exact integers from
/// H_{k+1} = 2z H_k - 2k H_{k-1}.
inline std::vector<BigInt> hermite_poly_coeffs(int k) {
  if (k < 0) throw std::invalid_argument("hermite_poly_coeffs: k >= 0 required");
  if (k > kMaxExactHermiteDegree)
    throw std::invalid_argument("hermite_poly_coeffs: degree beyond exact-arithmetic support");
  std::vector<BigInt> prev = {BigInt(1)};         // H_0
  if (k == 0) return prev;
  std::vector<BigInt> cur = {BigInt(0), BigInt(2)};  // H_1 = 2z
  for (int m = 1; m < k; ++m) {
    std::vector<BigInt> next(m + 2, BigInt(0));
    for (int i = 0; i <= m; ++i) next[i + 1] += 2 * cur[i];      // 2z * H_m
    for (int i = 0; i < m; ++i) next[i] -= 2 * m * prev[i];      // -2m * H_{m-1}
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Values h_0(x) .. h_kmax(x) of the L^2-normalized Hermite functions.
struct HermiteSequence {
  std::vector<double> values;
  double argument = 0.0;
  int max_degree = 0;
};

/// Hermite functions by the normalized three-term recurrence
///   h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x)
/// seeded by h_0(x) = pi^{-1/4} e^{-x^2/2}. The defining formula
/// (e^{x^2/2} times a k-th derivative of e^{-x^2}) is never formed.
inline HermiteSequence hermite_function_sequence(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("hermite_function_sequence: kmax >= 0 required");
  if (!std::isfinite(x)) throw std::invalid_argument("hermite_function_sequence: non-finite argument");
  HermiteSequence seq;
  seq.argument = x;
  seq.max_degree = kmax;
  seq.values.resize(kmax + 1);
  constexpr double pi_m4 = 0.7511255444649425;  // pi^{-1/4}
  double hm1 = 0.0;
  double h = pi_m4 * std::exp(-0.5 * x * x);
  seq.values[0] = h;
  for (int k = 0; k < kmax; ++k) {
    const double hp = x * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(double(k) / (k + 1)) * hm1;
    hm1 = h;
    h = hp;
    seq.values[k + 1] = h;
    if (std::abs(h) > kHermiteUniformBound + 1e-9)
      throw std::logic_error("hermite_function_sequence: uniform bound violated");
  }
  return seq;
}

/// Tensor-product Hermite function phi_alpha(x) = prod_j h_{alpha_j}(x_j).
inline double phi_alpha(const MultiIndex& alpha, std::span<const double> x) {
  const int n = alpha.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("phi_alpha: dimension mismatch");
  double p = 1.0;
  for (int j = 0; j < n; ++j) {
    p *= hermite_function_sequence(alpha.entries[j], x[j]).values[alpha.entries[j]];
  }
  return p;
}

/// Per-coordinate Hermite tables for batched tensor products:
/// out[j][m] = h_m(x_j), m <= kmax.
inline std::vector<std::vector<double>> hermite_coordinate_tables(int kmax,
                                                                  std::span<const double> x) {
  std::vector<std::vector<double>> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = hermite_function_sequence(kmax, x[j]).values;
  }
  return out;
}

}  // namespace hermex
