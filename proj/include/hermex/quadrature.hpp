#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hermex {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

/// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix of the
/// monic recurrence, weights are mu0 times the squared first eigenvector
/// components.
inline QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const int m = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("golub_welsch: eigen decomposition failed");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

inline const QuadratureRule& cached_rule(std::map<int, QuadratureRule>& cache, std::mutex& mu,
                                         int order, QuadratureRule (*make)(int)) {
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }
  QuadratureRule rule = make(order);
  std::lock_guard<std::mutex> lock(mu);
  // first writer wins; std::map references stay valid
  auto [it, inserted] = cache.emplace(order, std::move(rule));
  return it->second;
}

inline QuadratureRule make_gauss_hermite(int order) {
  std::vector<double> b(order - 1);
  for (int i = 1; i < order; ++i) b[i - 1] = std::sqrt(0.5 * i);
  return golub_welsch(b, std::sqrt(std::numbers::pi));
}

inline QuadratureRule make_gauss_legendre(int order) {
  std::vector<double> b(order - 1);
  for (int i = 1; i < order; ++i) b[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(b, 2.0);
}

}  // namespace detail

/// Gauss-Hermite rule of the given order for weight e^{-x^2} on R.
inline const QuadratureRule& gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order >= 1 required");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return detail::cached_rule(cache, mu, order, &detail::make_gauss_hermite);
}

/// Gauss-Legendre rule of the given order on [-1, 1].
inline const QuadratureRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order >= 1 required");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return detail::cached_rule(cache, mu, order, &detail::make_gauss_legendre);
}

/// Gauss-Legendre rule mapped to [a, b].
inline QuadratureRule gauss_legendre_on(int order, double a, double b) {
  const QuadratureRule& base = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = mid + half * base.nodes[i];
    rule.weights[i] = half * base.weights[i];
  }
  return rule;
}

}  // namespace hermex
