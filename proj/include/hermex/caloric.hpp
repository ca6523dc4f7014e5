#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermex/hermite.hpp"
#include "hermex/multi_index.hpp"
#include "hermex/summation.hpp"

namespace hermex {

using Rational = boost::multiprecision::cpp_rational;

/// One monomial coeff * x^xpow * t^tpow of a caloric polynomial. The
/// rational coefficient is exact (dyadic for Q_alpha); coeff_d caches the
/// double conversion for evaluation.
struct CaloricTerm {
  std::vector<int> xpow;
  int tpow = 0;
  Rational coeff;
  double coeff_d = 0.0;

  int parabolic_degree() const {
    int s = tpow * 2;
    for (int b : xpow) s += b;
    return s;
  }
};

namespace detail {

inline bool term_order(const CaloricTerm& a, const CaloricTerm& b) {
  const int xa = std::accumulate(a.xpow.begin(), a.xpow.end(), 0);
  const int xb = std::accumulate(b.xpow.begin(), b.xpow.end(), 0);
  if (xa != xb) return xa > xb;
  if (a.xpow != b.xpow) return a.xpow > b.xpow;
  return a.tpow < b.tpow;
}

}  // namespace detail

/// Polynomial in (x_1..x_n, t) with exact rational monomials and a separate
/// irrational scalar prefactor. Parabolically homogeneous: every monomial
/// satisfies |xpow| + 2 tpow = degree (enforced on construction).
struct CaloricPolynomial {
  int dimension = 0;
  int degree = 0;
  double prefactor = 1.0;
  std::vector<CaloricTerm> terms;  // canonical order, zero coefficients dropped

  bool is_zero() const { return terms.empty(); }
};

namespace detail {

using MonomialKey = std::pair<std::vector<int>, int>;

inline CaloricPolynomial assemble(int n, int degree_hint, double prefactor,
                                  std::map<MonomialKey, Rational>&& raw) {
  CaloricPolynomial p;
  p.dimension = n;
  p.prefactor = prefactor;
  for (auto& [key, c] : raw) {
    if (c == 0) continue;
    CaloricTerm term;
    term.xpow = key.first;
    term.tpow = key.second;
    term.coeff = std::move(c);
    term.coeff_d = static_cast<double>(term.coeff);
    p.terms.push_back(std::move(term));
  }
  std::sort(p.terms.begin(), p.terms.end(), &term_order);
  if (p.terms.empty()) {
    p.degree = std::max(degree_hint, 0);
    return p;
  }
  p.degree = p.terms.front().parabolic_degree();
  for (const auto& term : p.terms) {
    if (term.parabolic_degree() != p.degree)
      throw std::invalid_argument("CaloricPolynomial: monomials of mixed parabolic degree");
  }
  return p;
}

}  // namespace detail

/// Builds a polynomial from explicit monomials (test fixtures and the like).
inline CaloricPolynomial make_caloric_polynomial(
    int n, std::vector<std::tuple<std::vector<int>, int, Rational>> monomials,
    double prefactor = 1.0) {
  std::map<detail::MonomialKey, Rational> raw;
  for (auto& [xpow, tpow, coeff] : monomials) {
    if (static_cast<int>(xpow.size()) != n || tpow < 0)
      throw std::invalid_argument("make_caloric_polynomial: bad monomial");
    raw[{xpow, tpow}] += coeff;
  }
  return detail::assemble(n, 0, prefactor, std::move(raw));
}

/// The backward caloric polynomial Q_alpha(x,t) = t^{k/2} phi_alpha(x/2
/// sqrt(t)) e^{|x|^2/8t}, expanded exactly: per coordinate,
/// t^{a/2} H_a(x_j/2 sqrt(t)) = sum_d Hcoeff[d] 2^{-d} x_j^d t^{(a-d)/2};
/// the Gaussian factors cancel identically and no exponential appears. The
/// prefactor (2^k alpha! pi^{n/2})^{-1/2} is kept separately in double.
inline CaloricPolynomial q_alpha(const MultiIndex& alpha) {
  const int n = alpha.dim();
  const int k = alpha.degree();
  if (n < 1) throw std::invalid_argument("q_alpha: empty multi-index");
  if (k > kMaxExactHermiteDegree)
    throw std::invalid_argument("q_alpha: degree beyond exact-arithmetic support");

  // terms of the running product over coordinates 0..j
  std::map<detail::MonomialKey, Rational> acc;
  acc[{std::vector<int>(), 0}] = 1;
  for (int j = 0; j < n; ++j) {
    const int a = alpha.entries[j];
    const auto hc = hermite_poly_coeffs(a);
    std::map<detail::MonomialKey, Rational> next;
    for (const auto& [key, c] : acc) {
      for (int d = a % 2; d <= a; d += 2) {
        if (hc[d] == 0) continue;
        Rational factor(hc[d]);
        factor /= Rational(BigInt(1) << d);  // 2^{-d}
        detail::MonomialKey nk = key;
        nk.first.push_back(d);
        nk.second += (a - d) / 2;
        next[std::move(nk)] += c * factor;
      }
    }
    acc = std::move(next);
  }

  double prefactor = 1.0;
  for (int j = 0; j < n; ++j) {
    double f = std::sqrt(std::numbers::pi);
    for (int i = 1; i <= alpha.entries[j]; ++i) f *= 2.0 * i;  // 2^a a!
    prefactor /= std::sqrt(f);
  }
  return detail::assemble(n, k, prefactor, std::move(acc));
}

/// prefactor * sum of monomials; defined for all real t including t <= 0.
inline double poly_eval(const CaloricPolynomial& p, std::span<const double> x, double t) {
  if (static_cast<int>(x.size()) != p.dimension)
    throw std::invalid_argument("poly_eval: dimension mismatch");
  NeumaierSum acc;
  for (const auto& term : p.terms) {
    double m = term.coeff_d;
    for (int j = 0; j < p.dimension; ++j) {
      for (int b = 0; b < term.xpow[j]; ++b) m *= x[j];
    }
    for (int b = 0; b < term.tpow; ++b) m *= t;
    acc.add(m);
  }
  return p.prefactor * acc.value();
}

/// Heat operator on the rational part: returns Delta p + d_t p, exactly.
/// For p = q_alpha the result is the identically-zero polynomial.
inline CaloricPolynomial heat_operator_apply(const CaloricPolynomial& p) {
  std::map<detail::MonomialKey, Rational> raw;
  for (const auto& term : p.terms) {
    for (int j = 0; j < p.dimension; ++j) {
      const int b = term.xpow[j];
      if (b >= 2) {
        detail::MonomialKey key{term.xpow, term.tpow};
        key.first[j] -= 2;
        raw[std::move(key)] += term.coeff * b * (b - 1);
      }
    }
    if (term.tpow >= 1) {
      detail::MonomialKey key{term.xpow, term.tpow - 1};
      raw[std::move(key)] += term.coeff * term.tpow;
    }
  }
  return detail::assemble(p.dimension, p.degree - 2, p.prefactor, std::move(raw));
}

/// Structural homogeneity check |xpow| + 2 tpow = degree on every monomial.
inline bool is_parabolically_homogeneous(const CaloricPolynomial& p) {
  for (const auto& term : p.terms) {
    if (term.parabolic_degree() != p.degree) return false;
  }
  return true;
}

/// Human-readable monomial list, e.g. "0.354 * (x1^2 - 2*t)".
inline std::string to_string(const CaloricPolynomial& p) {
  std::ostringstream os;
  os << p.prefactor << " * (";
  if (p.terms.empty()) os << "0";
  bool first = true;
  for (const auto& term : p.terms) {
    Rational c = term.coeff;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    } else {
      if (c < 0) {
        os << "-";
        c = -c;
      }
      first = false;
    }
    bool has_var = false;
    for (int j = 0; j < p.dimension; ++j) has_var = has_var || term.xpow[j] > 0;
    has_var = has_var || term.tpow > 0;
    if (c != 1 || !has_var) {
      os << c;
      if (has_var) os << "*";
    }
    bool need_sep = false;
    for (int j = 0; j < p.dimension; ++j) {
      if (term.xpow[j] == 0) continue;
      if (need_sep) os << "*";
      os << "x" << (j + 1);
      if (term.xpow[j] > 1) os << "^" << term.xpow[j];
      need_sep = true;
    }
    if (term.tpow > 0) {
      if (need_sep) os << "*";
      os << "t";
      if (term.tpow > 1) os << "^" << term.tpow;
    }
  }
  os << ")";
  return os.str();
}

/// Normalized 1-D caloric Hermite values
///   q_m(x,t) = (2^m m! sqrt(pi))^{-1/2} t^{m/2} H_m(x / 2 sqrt(t)),
/// by the recurrence q_{m+1} = x q_m / sqrt(2(m+1)) - t sqrt(m/(m+1)) q_{m-1},
/// q_0 = pi^{-1/4}. Polynomial in (x,t): finite and stable for all real t.
/// Q_alpha(x,t) = prod_j q_{alpha_j}(x_j, t).
inline std::vector<double> caloric_hermite_sequence(double x, double t, int kmax) {
  if (kmax < 0) throw std::invalid_argument("caloric_hermite_sequence: kmax >= 0 required");
  std::vector<double> q(kmax + 1);
  constexpr double pi_m4 = 0.7511255444649425;
  q[0] = pi_m4;
  double qm1 = 0.0, qc = q[0];
  for (int m = 0; m < kmax; ++m) {
    const double qp = x / std::sqrt(2.0 * (m + 1)) * qc - t * std::sqrt(double(m) / (m + 1)) * qm1;
    qm1 = qc;
    qc = qp;
    q[m + 1] = qc;
  }
  return q;
}

using SpaceTimeFn = std::function<double(std::span<const double>, double)>;

/// Appell transformation of a black-box function:
///   v(x,t) = |t|^{-n/2} e^{-|x|^2/4t} u(x/t, 1/t), t != 0.
inline SpaceTimeFn appell_transform(SpaceTimeFn u, int n) {
  if (n < 1) throw std::invalid_argument("appell_transform: n >= 1 required");
  return [u = std::move(u), n](std::span<const double> x, double t) -> double {
    if (t == 0.0) throw std::invalid_argument("appell_transform: t = 0");
    if (static_cast<int>(x.size()) != n)
      throw std::invalid_argument("appell_transform: dimension mismatch");
    double norm2 = 0.0;
    std::vector<double> xt(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      norm2 += x[j] * x[j];
      xt[j] = x[j] / t;
    }
    return std::pow(std::abs(t), -0.5 * n) * std::exp(-norm2 / (4.0 * t)) *
           u(std::span<const double>(xt), 1.0 / t);
  };
}

/// Polynomial-aware overload wrapping poly_eval.
inline SpaceTimeFn appell_transform(const CaloricPolynomial& p) {
  return appell_transform(
      [p](std::span<const double> x, double t) { return poly_eval(p, x, t); }, p.dimension);
}

/// Closed form of the Appell image of Q_alpha (forward caloric):
///   s^{-(k+n)/2} phi_alpha(y / 2 sqrt(s)) e^{-|y|^2/8s}, s > 0.
inline double appell_image_q_alpha(const MultiIndex& alpha, std::span<const double> y, double s) {
  const int n = alpha.dim();
  const int k = alpha.degree();
  if (static_cast<int>(y.size()) != n)
    throw std::invalid_argument("appell_image_q_alpha: dimension mismatch");
  if (!(s > 0.0)) throw std::invalid_argument("appell_image_q_alpha: s > 0 required");
  const double root_s = std::sqrt(s);
  double norm2 = 0.0;
  double phi = 1.0;
  for (int j = 0; j < n; ++j) {
    norm2 += y[j] * y[j];
    const int a = alpha.entries[j];
    phi *= hermite_function_sequence(a, y[j] / (2.0 * root_s)).values[a];
  }
  return std::pow(s, -0.5 * (k + n)) * phi * std::exp(-norm2 / (8.0 * s));
}

/// Finite-difference residual of the Appell conjugation identity
///   (Delta - d_t) v = |t|^{-2-n/2} e^{-|x|^2/4t} (Delta + d_t) u (x/t, 1/t)
/// with v the Appell transformation of u. Both sides by central differences;
/// expected O(h^2) times derivative magnitudes.
inline double appell_conjugation_residual(const SpaceTimeFn& u, std::span<const double> x,
                                          double t, double h) {
  const int n = static_cast<int>(x.size());
  if (!(h > 0.0) || h > 1e-2)
    throw std::invalid_argument("appell_conjugation_residual: need 0 < h <= 1e-2");
  if (t == 0.0 || std::abs(t) <= h)
    throw std::invalid_argument("appell_conjugation_residual: need |t| > h, t != 0");
  const SpaceTimeFn v = appell_transform(u, n);

  auto heat_sides = [n, h](const SpaceTimeFn& f, std::span<const double> p, double tau,
                           double time_sign) {
    // Delta_h f + time_sign * d_t^h f
    std::vector<double> pt(p.begin(), p.end());
    const double center = f(pt, tau);
    double lap = 0.0;
    for (int j = 0; j < n; ++j) {
      pt[j] = p[j] + h;
      const double fp = f(pt, tau);
      pt[j] = p[j] - h;
      const double fm = f(pt, tau);
      pt[j] = p[j];
      lap += (fp - 2.0 * center + fm) / (h * h);
    }
    const double dt = (f(pt, tau + h) - f(pt, tau - h)) / (2.0 * h);
    return lap + time_sign * dt;
  };

  const double lhs = heat_sides(v, x, t, -1.0);
  double norm2 = 0.0;
  std::vector<double> xt(x.size());
  for (int j = 0; j < n; ++j) {
    norm2 += x[j] * x[j];
    xt[j] = x[j] / t;
  }
  const double rhs = std::pow(std::abs(t), -2.0 - 0.5 * n) * std::exp(-norm2 / (4.0 * t)) *
                     heat_sides(u, xt, 1.0 / t, +1.0);
  return std::abs(lhs - rhs);
}

}  // namespace hermex
