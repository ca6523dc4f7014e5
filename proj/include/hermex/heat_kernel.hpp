#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/multi_index.hpp"
#include "hermex/projection.hpp"
#include "hermex/quadrature.hpp"
#include "hermex/summation.hpp"

namespace hermex {

struct SpaceTimePoint {
  std::vector<double> x;
  double t = 0.0;

  int dim() const { return static_cast<int>(x.size()); }
};

struct ExpansionResult {
  double value = 0.0;
  int degrees_used = 0;
  double tail_estimate = 0.0;
  bool converged = false;
};

/// Fundamental solution of the backward heat equation:
///   (4 pi (s-t))^{-n/2} e^{-|x-y|^2 / 4(s-t)} when t < s, 0 when t > s.
/// The diagonal t = s is rejected.
inline double gaussian_backward(std::span<const double> x, double t, std::span<const double> y,
                                double s) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("gaussian_backward: dimension mismatch");
  if (t == s) throw std::invalid_argument("gaussian_backward: undefined on the diagonal t = s");
  if (t > s) return 0.0;
  const int n = static_cast<int>(x.size());
  double d2 = 0.0;
  for (int j = 0; j < n; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
  return std::pow(4.0 * std::numbers::pi * (s - t), -0.5 * n) * std::exp(-d2 / (4.0 * (s - t)));
}

inline double gaussian_backward(const SpaceTimePoint& p, const SpaceTimePoint& q) {
  return gaussian_backward(p.x, p.t, q.x, q.t);
}

/// Fundamental solution of the heat operator, nonzero when s < t. Satisfies
/// G(x,t,y,s) = G_b(x,-t,y,-s).
inline double gaussian_forward(std::span<const double> x, double t, std::span<const double> y,
                               double s) {
  return gaussian_backward(x, -t, y, -s);
}

inline double gaussian_forward(const SpaceTimePoint& p, const SpaceTimePoint& q) {
  return gaussian_forward(p.x, p.t, q.x, q.t);
}

namespace detail {

/// Per-coordinate factor tables for the Q_alpha * A_alpha series:
///   w[j][m] = q_m(x_j, t) * s^{-(m+1)/2} h_m(y_j / 2 sqrt(s)) e^{-y_j^2/8s},
/// computed in the parabolically rescaled variables so both factors stay
/// O(ratio^{m/2}) for any s. Extendable degree by degree.
class HeatSeriesTables {
 public:
  HeatSeriesTables(std::span<const double> x, double t, std::span<const double> y, double s)
      : n_(static_cast<int>(x.size())) {
    if (x.size() != y.size() || x.empty())
      throw std::invalid_argument("heat series: dimension mismatch");
    if (!(s > 0.0)) throw std::invalid_argument("heat series: s > 0 required");
    if (!(std::abs(t) < s)) throw std::invalid_argument("heat series: |t| < s required");
    const double rs = std::sqrt(s);
    tau_ = t / s;
    u_.resize(n_);
    z_.resize(n_);
    g_.resize(n_);
    w_.resize(n_);
    q_prev_.assign(n_, 0.0);
    q_cur_.resize(n_);
    h_prev_.assign(n_, 0.0);
    h_cur_.resize(n_);
    constexpr double pi_m4 = 0.7511255444649425;
    for (int j = 0; j < n_; ++j) {
      u_[j] = x[j] / rs;
      z_[j] = y[j] / (2.0 * rs);
      g_[j] = std::exp(-0.5 * z_[j] * z_[j]) / rs;  // explicit half-Gaussian and s^{-1/2}
      q_cur_[j] = pi_m4;
      h_cur_[j] = pi_m4 * std::exp(-0.5 * z_[j] * z_[j]);
      w_[j].push_back(q_cur_[j] * h_cur_[j] * g_[j]);
    }
    kmax_ = 0;
    scale_ = std::pow(4.0, -0.5 * n_);
  }

  void extend(int kmax) {
    for (int m = kmax_; m < kmax; ++m) {
      for (int j = 0; j < n_; ++j) {
        const double qp = u_[j] / std::sqrt(2.0 * (m + 1)) * q_cur_[j] -
                          tau_ * std::sqrt(double(m) / (m + 1)) * q_prev_[j];
        q_prev_[j] = q_cur_[j];
        q_cur_[j] = qp;
        const double hp = z_[j] * std::sqrt(2.0 / (m + 1)) * h_cur_[j] -
                          std::sqrt(double(m) / (m + 1)) * h_prev_[j];
        h_prev_[j] = h_cur_[j];
        h_cur_[j] = hp;
        w_[j].push_back(q_cur_[j] * h_cur_[j] * g_[j]);
      }
      ++kmax_;
    }
  }

  /// 4^{-n/2} sum_{|alpha|=k} Q_alpha(x,t) A_alpha(y,s)
  double degree_term(int k) {
    extend(k);
    return scale_ * sum_degree_products(w_, k);
  }

  int dim() const { return n_; }

 private:
  int n_;
  double tau_ = 0.0;
  double scale_ = 1.0;
  int kmax_ = 0;
  std::vector<double> u_, z_, g_;
  std::vector<double> q_prev_, q_cur_, h_prev_, h_cur_;
  std::vector<std::vector<double>> w_;
};

}  // namespace detail

/// Incremental evaluator of the Taylor series of the backward Gaussian
/// kernel: partial(K) returns the sum through degree K, extending the
/// underlying recurrences rather than recomputing.
class TaylorSeries {
 public:
  TaylorSeries(std::span<const double> x, double t, std::span<const double> y, double s)
      : tables_(x, t, y, s) {}

  double partial(int K) {
    if (K < 0) throw std::invalid_argument("TaylorSeries: K >= 0 required");
    if (K < done_)
      throw std::invalid_argument("TaylorSeries: partial sums extend forward only");
    while (done_ < K) {
      ++done_;
      last_increment_ = tables_.degree_term(done_);
      acc_.add(last_increment_);
    }
    return acc_.value();
  }

  double last_increment() const { return last_increment_; }
  int degree() const { return done_; }

 private:
  detail::HeatSeriesTables tables_;
  NeumaierSum acc_;
  int done_ = -1;
  double last_increment_ = 0.0;
};

/// Partial sum of the Taylor series of the backward Gaussian kernel,
///   4^{-n/2} sum_{k<=K} sum_{|alpha|=k} Q_alpha(x,t) A_alpha(y,s),
/// with A_alpha(y,s) = s^{-(k+n)/2} phi_alpha(y/2 sqrt(s)) e^{-|y|^2/8s} the
/// Appell image of Q_alpha. Algebraically identical to the literal
/// (4s)^{-n/2} e^{|x|^2/8t} sum (t/s)^{k/2} Phi_k(x/2 sqrt(t), y/2 sqrt(s))
/// e^{-|y|^2/8s} for 0 < t < s, but finite and well defined for |t| < s.
inline double taylor_partial(std::span<const double> x, double t, std::span<const double> y,
                             double s, int K) {
  if (K < 0) throw std::invalid_argument("taylor_partial: K >= 0 required");
  TaylorSeries series(x, t, y, s);
  return series.partial(K);
}

/// Adaptive truncation: extends the series until the last three degree
/// increments are each <= tol * max(1, |partial|) and the geometric tail
/// extrapolation (last increment) * r/(1-r), r = |t|/s, is below the same
/// threshold, so converged implies tail_estimate <= tol * max(1, |value|).
/// degrees_used reports the highest degree whose increment still exceeded
/// the threshold. Hitting K_max returns converged = false with the honest
/// tail, never a fabricated value.
inline ExpansionResult taylor_adaptive(std::span<const double> x, double t,
                                       std::span<const double> y, double s, double tol,
                                       int K_max = 200) {
  if (!(tol > 0.0)) throw std::invalid_argument("taylor_adaptive: tol > 0 required");
  detail::HeatSeriesTables tables(x, t, y, s);
  const double r = std::abs(t) / s;
  const double tail_factor = r / (1.0 - r);
  NeumaierSum acc;
  ExpansionResult res;
  int small_run = 0;
  double last_inc = 0.0;
  for (int k = 0; k <= K_max; ++k) {
    last_inc = tables.degree_term(k);
    acc.add(last_inc);
    const double thresh = tol * std::max(1.0, std::abs(acc.value()));
    if (std::abs(last_inc) <= thresh) {
      ++small_run;
      if (small_run >= 3 && std::abs(last_inc) * tail_factor <= thresh) {
        res.value = acc.value();
        res.tail_estimate = std::abs(last_inc) * tail_factor;
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
  res.tail_estimate = std::abs(last_inc) * tail_factor;
  res.converged = false;
  return res;
}

/// The literal Theorem 1 right side
///   (4s)^{-n/2} e^{|x|^2/8t} sum_{k<=K} (t/s)^{k/2}
///     Phi_k(x/2 sqrt(t), y/2 sqrt(s)) e^{-|y|^2/8s},
/// valid for 0 < t < s only. Used as the dual-formula cross-check for
/// taylor_partial.
inline double taylor_literal(std::span<const double> x, double t, std::span<const double> y,
                             double s, int K) {
  if (!(t > 0.0 && t < s)) throw std::invalid_argument("taylor_literal: 0 < t < s required");
  const int n = static_cast<int>(x.size());
  const double rt = std::sqrt(t), rss = std::sqrt(s);
  MehlerQuery q;
  q.x.resize(n);
  q.y.resize(n);
  q.xi = std::sqrt(t / s);
  double x2 = 0.0, y2 = 0.0;
  for (int j = 0; j < n; ++j) {
    q.x[j] = x[j] / (2.0 * rt);
    q.y[j] = y[j] / (2.0 * rss);
    x2 += x[j] * x[j];
    y2 += y[j] * y[j];
  }
  return std::pow(4.0 * s, -0.5 * n) * std::exp(x2 / (8.0 * t)) * mehler_partial(q, K) *
         std::exp(-y2 / (8.0 * s));
}

/// Left side of the proof's substitution identity:
///   s^{-n/2} sum_{k<=K} (t/s)^{k/2} Phi_k(x/2 sqrt(t), y/2 sqrt(s)).
inline double substitution_series(std::span<const double> x, double t, std::span<const double> y,
                                  double s, int K) {
  if (!(t > 0.0 && t < s))
    throw std::invalid_argument("substitution_series: 0 < t < s required");
  const int n = static_cast<int>(x.size());
  MehlerQuery q;
  q.x.resize(n);
  q.y.resize(n);
  q.xi = std::sqrt(t / s);
  for (int j = 0; j < n; ++j) {
    q.x[j] = x[j] / (2.0 * std::sqrt(t));
    q.y[j] = y[j] / (2.0 * std::sqrt(s));
  }
  return std::pow(s, -0.5 * n) * mehler_partial(q, K);
}

/// Closed form of the same:
///   pi^{-n/2} (s-t)^{-n/2}
///     exp(-((s+t)/(s-t)) (|x|^2/8t + |y|^2/8s) + <x,y>/2(s-t)).
inline double substitution_closed(std::span<const double> x, double t, std::span<const double> y,
                                  double s) {
  if (!(t > 0.0 && t < s))
    throw std::invalid_argument("substitution_closed: 0 < t < s required");
  const int n = static_cast<int>(x.size());
  double x2 = 0.0, y2 = 0.0, dot = 0.0;
  for (int j = 0; j < n; ++j) {
    x2 += x[j] * x[j];
    y2 += y[j] * y[j];
    dot += x[j] * y[j];
  }
  const double expo =
      -(s + t) / (s - t) * (x2 / (8.0 * t) + y2 / (8.0 * s)) + dot / (2.0 * (s - t));
  return std::pow(std::numbers::pi * (s - t), -0.5 * n) * std::exp(expo);
}

/// Smooth compactly supported space-time test function on R x R (n = 1) with
/// analytic heat deficit (Delta - d_s) f and known support box.
struct SpaceTimeTestFunction {
  std::function<double(double, double)> value;         // f(y, s)
  std::function<double(double, double)> heat_deficit;  // (Delta - d_s) f (y, s)
  double y_lo = std::numeric_limits<double>::quiet_NaN();
  double y_hi = std::numeric_limits<double>::quiet_NaN();
  double s_lo = std::numeric_limits<double>::quiet_NaN();
  double s_hi = std::numeric_limits<double>::quiet_NaN();
};

struct HeatQuadSpec {
  int time_order = 96;     // Gauss-Legendre in u = sqrt(t - s)
  int space_points = 384;  // midpoint points in the rescaled space variable
};

/// Residual |f(x,t) + int int G(x,t,y,s) (Delta f - d_s f) dy ds| of the heat
/// representation identity, n = 1. The s-integral is split at s = t with the
/// singular factor removed by u = sqrt(t-s); the y-integral runs in the
/// kernel-scaled variable y = x + 2uv over the support window. The v-rule is
/// a uniform midpoint sum: the integrand vanishes to all orders at the window
/// ends (bump boundary or Gaussian decay), where equal-weight rules converge
/// spectrally even for non-analytic C-infinity integrands.
inline double heat_representation_residual(const SpaceTimeTestFunction& f, double x, double t,
                                           const HeatQuadSpec& spec = {}) {
  if (!(f.y_lo < f.y_hi) || !(f.s_lo < f.s_hi))
    throw std::invalid_argument("heat_representation_residual: support box required");
  if (!f.value || !f.heat_deficit)
    throw std::invalid_argument("heat_representation_residual: test function incomplete");
  constexpr double vcut = 8.5;  // e^{-v^2} below 3e-32
  double integral = 0.0;
  if (t > f.s_lo) {
    const double u_min = t > f.s_hi ? std::sqrt(t - f.s_hi) : 0.0;
    const double u_max = std::sqrt(t - f.s_lo);
    const QuadratureRule u_rule = gauss_legendre_on(spec.time_order, u_min, u_max);
    NeumaierSum acc;
    for (int i = 0; i < spec.time_order; ++i) {
      const double u = u_rule.nodes[i];
      const double s = t - u * u;
      const double v_lo = std::max(-vcut, (f.y_lo - x) / (2.0 * u));
      const double v_hi = std::min(vcut, (f.y_hi - x) / (2.0 * u));
      if (!(v_lo < v_hi)) continue;
      const double dv = (v_hi - v_lo) / spec.space_points;
      NeumaierSum inner;
      for (int j = 0; j < spec.space_points; ++j) {
        const double v = v_lo + (j + 0.5) * dv;
        inner.add(std::exp(-v * v) * f.heat_deficit(x + 2.0 * u * v, s));
      }
      acc.add(u_rule.weights[i] * 2.0 * u / std::sqrt(std::numbers::pi) * inner.value() * dv);
    }
    integral = acc.value();
  }
  return std::abs(f.value(x, t) + integral);
}

}  // namespace hermex
