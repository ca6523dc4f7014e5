#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/hermite.hpp"
#include "hermex/multi_index.hpp"
#include "hermex/quadrature.hpp"
#include "hermex/summation.hpp"

namespace hermex {

/// Evaluation request for the generating formula: real xi with |xi| < 1.
struct MehlerQuery {
  std::vector<double> x;
  std::vector<double> y;
  double xi = 0.0;

  int dim() const { return static_cast<int>(x.size()); }

  void validate() const {
    if (x.size() != y.size() || x.empty())
      throw std::invalid_argument("MehlerQuery: dimension mismatch");
    if (!(std::abs(xi) < 1.0))
      throw std::invalid_argument("MehlerQuery: |xi| < 1 required");
  }
};

namespace detail {

inline std::vector<std::vector<double>> pair_product_tables(int kmax, std::span<const double> x,
                                                            std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> w(n);
  for (int j = 0; j < n; ++j) {
    const auto hx = hermite_function_sequence(kmax, x[j]).values;
    const auto hy = hermite_function_sequence(kmax, y[j]).values;
    w[j].resize(kmax + 1);
    for (int m = 0; m <= kmax; ++m) w[j][m] = hx[m] * hy[m];
  }
  return w;
}

}  // namespace detail

/// Projection kernel Phi_k(x,y) = sum_{|alpha|=k} phi_alpha(x) phi_alpha(y),
/// accumulated in graded-lex order with compensated summation.
inline double phi_k_kernel(int k, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("phi_k_kernel: dimension mismatch");
  if (k < 0) throw std::invalid_argument("phi_k_kernel: k >= 0 required");
  const auto w = detail::pair_product_tables(k, x, y);
  return sum_degree_products(w, k);
}

/// Closed form of the generating formula:
///   sum_k Phi_k(x,y) xi^k
///     = pi^{-n/2} (1-xi^2)^{-n/2}
///       exp(-(1/2)((1+xi^2)/(1-xi^2))(|x|^2+|y|^2) + 2 xi <x,y>/(1-xi^2)).
inline double mehler_closed(const MehlerQuery& q) {
  q.validate();
  const int n = q.dim();
  const double xi2 = q.xi * q.xi;
  double norm2 = 0.0, dot = 0.0;
  for (int j = 0; j < n; ++j) {
    norm2 += q.x[j] * q.x[j] + q.y[j] * q.y[j];
    dot += q.x[j] * q.y[j];
  }
  const double denom = 1.0 - xi2;
  const double expo = -0.5 * (1.0 + xi2) / denom * norm2 + 2.0 * q.xi * dot / denom;
  return std::pow(std::numbers::pi * denom, -0.5 * n) * std::exp(expo);
}

/// Partial sum sum_{k=0}^{K} Phi_k(x,y) xi^k.
inline double mehler_partial(const MehlerQuery& q, int K) {
  q.validate();
  if (K < 0) throw std::invalid_argument("mehler_partial: K >= 0 required");
  const auto w = detail::pair_product_tables(K, q.x, q.y);
  NeumaierSum acc;
  double xik = 1.0;
  for (int k = 0; k <= K; ++k) {
    acc.add(xik * sum_degree_products(w, k));
    xik *= q.xi;
  }
  return acc.value();
}

struct MehlerPartialResult {
  double value = 0.0;
  int degrees_used = 0;
  bool converged = false;
};

/// Extends the partial sum until `consecutive` successive degree increments
/// are below rel_tol relative to the running sum (or K_max is hit).
inline MehlerPartialResult mehler_adaptive(const MehlerQuery& q, double rel_tol = 1e-13,
                                           int consecutive = 3, int K_max = 400) {
  q.validate();
  const int n = q.dim();
  std::vector<std::vector<double>> w(n);
  // rolling recurrence state per coordinate and side
  std::vector<double> hx_prev(n, 0.0), hx_cur(n), hy_prev(n, 0.0), hy_cur(n);
  constexpr double pi_m4 = 0.7511255444649425;
  for (int j = 0; j < n; ++j) {
    hx_cur[j] = pi_m4 * std::exp(-0.5 * q.x[j] * q.x[j]);
    hy_cur[j] = pi_m4 * std::exp(-0.5 * q.y[j] * q.y[j]);
    w[j].push_back(hx_cur[j] * hy_cur[j]);
  }
  MehlerPartialResult res;
  NeumaierSum acc;
  double xik = 1.0;
  int small_run = 0;
  for (int k = 0; k <= K_max; ++k) {
    if (k > 0) {
      for (int j = 0; j < n; ++j) {
        const double ax = q.x[j] * std::sqrt(2.0 / k) * hx_cur[j] -
                          std::sqrt(double(k - 1) / k) * hx_prev[j];
        hx_prev[j] = hx_cur[j];
        hx_cur[j] = ax;
        const double ay = q.y[j] * std::sqrt(2.0 / k) * hy_cur[j] -
                          std::sqrt(double(k - 1) / k) * hy_prev[j];
        hy_prev[j] = hy_cur[j];
        hy_cur[j] = ay;
        w[j].push_back(hx_cur[j] * hy_cur[j]);
      }
      xik *= q.xi;
    }
    const double inc = xik * sum_degree_products(w, k);
    acc.add(inc);
    if (std::abs(inc) <= rel_tol * std::max(1.0, std::abs(acc.value()))) {
      if (++small_run >= consecutive) {
        res.value = acc.value();
        res.degrees_used = k;
        res.converged = true;
        return res;
      }
    } else {
      small_run = 0;
      res.degrees_used = k;
    }
  }
  res.value = acc.value();
  res.degrees_used = K_max;
  res.converged = false;
  return res;
}

/// Coefficients <f, phi_alpha> for all |alpha| = k (graded-lex order) by
/// tensorized Gauss-Hermite quadrature against the weight-compensated
/// integrand f(y) phi_alpha(y) e^{|y|^2}. Caller contract: f smooth with
/// rapid decay. Refuses quadrature orders too low for the requested degree.
template <typename F>
std::vector<double> project_component(F&& f, int n, int k, int quad_order) {
  if (n < 1 || n > 2) throw std::invalid_argument("project_component: n <= 2 supported");
  if (k < 0) throw std::invalid_argument("project_component: k >= 0 required");
  if (quad_order < 2 * k + 2)
    throw std::invalid_argument("project_component: quadrature order too low for degree");
  const QuadratureRule& rule = gauss_hermite(quad_order);
  const int m = quad_order;
  // h_m(node) tables and compensated weights w_i e^{z_i^2}
  std::vector<std::vector<double>> hval(m);
  std::vector<double> cw(m);
  for (int i = 0; i < m; ++i) {
    hval[i] = hermite_function_sequence(k, rule.nodes[i]).values;
    cw[i] = rule.weights[i] * std::exp(rule.nodes[i] * rule.nodes[i]);
  }
  const auto alphas = multi_indices(n, k);
  std::vector<double> coeffs(alphas.size());
  std::vector<double> pt(n);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const auto& alpha = alphas[a];
    NeumaierSum acc;
    if (n == 1) {
      for (int i = 0; i < m; ++i) {
        pt[0] = rule.nodes[i];
        acc.add(cw[i] * f(std::span<const double>(pt)) * hval[i][alpha.entries[0]]);
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          pt[0] = rule.nodes[i];
          pt[1] = rule.nodes[j];
          acc.add(cw[i] * cw[j] * f(std::span<const double>(pt)) * hval[i][alpha.entries[0]] *
                  hval[j][alpha.entries[1]]);
        }
      }
    }
    coeffs[a] = acc.value();
  }
  return coeffs;
}

/// P_k(f)(x) = sum_{|alpha|=k} <f, phi_alpha> phi_alpha(x), from coefficients
/// in the graded-lex order produced by project_component.
inline double projection_eval(std::span<const double> coeffs, int k, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const auto alphas = multi_indices(n, k);
  if (coeffs.size() != alphas.size())
    throw std::invalid_argument("projection_eval: coefficient count mismatch");
  const auto tables = hermite_coordinate_tables(k, x);
  NeumaierSum acc;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    double p = coeffs[a];
    for (int j = 0; j < n; ++j) p *= tables[j][alphas[a].entries[j]];
    acc.add(p);
  }
  return acc.value();
}

/// Finite-difference check of the eigenrelation H phi_alpha = -(2|alpha|+n)
/// phi_alpha with H = Laplacian - |x|^2. Returns
/// |Delta_h phi_alpha(x) - |x|^2 phi_alpha(x) + (2|alpha|+n) phi_alpha(x)|,
/// expected O(h^2).
inline double hermite_operator_residual(const MultiIndex& alpha, std::span<const double> x,
                                        double h) {
  const int n = alpha.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("hermite_operator_residual: dimension mismatch");
  if (!(h > 0.0) || h > 1e-2)
    throw std::invalid_argument("hermite_operator_residual: need 0 < h <= 1e-2");
  const double center = phi_alpha(alpha, x);
  std::vector<double> pt(x.begin(), x.end());
  double lap = 0.0;
  for (int j = 0; j < n; ++j) {
    pt[j] = x[j] + h;
    const double fp = phi_alpha(alpha, pt);
    pt[j] = x[j] - h;
    const double fm = phi_alpha(alpha, pt);
    pt[j] = x[j];
    lap += (fp - 2.0 * center + fm) / (h * h);
  }
  double norm2 = 0.0;
  for (int j = 0; j < n; ++j) norm2 += x[j] * x[j];
  return std::abs(lap - norm2 * center + (2.0 * alpha.degree() + n) * center);
}

}  // namespace hermex
