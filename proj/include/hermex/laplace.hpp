#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/quadrature.hpp"
#include "hermex/summation.hpp"

namespace hermex {

/// Surface measure of the unit sphere S^{n-1}: omega_n = 2 pi^{n/2} / Gamma(n/2).
inline double sphere_surface_measure(int n) {
  if (n < 2) throw std::invalid_argument("sphere_surface_measure: n >= 2 required");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Zonal harmonic evaluation request: degree k, dimension n >= 2, and the
/// cosine u = x'.y' in [-1, 1].
struct ZonalQuery {
  int k = 0;
  int n = 2;
  double u = 0.0;

  void validate() const {
    if (k < 0 || n < 2) throw std::invalid_argument("ZonalQuery: k >= 0, n >= 2 required");
    if (!(std::abs(u) <= 1.0)) throw std::invalid_argument("ZonalQuery: |u| <= 1 required");
  }
};

/// Fundamental solution of the Laplace operator:
///   (omega_n (2-n))^{-1} |x-y|^{2-n} for n > 2, (2 pi)^{-1} log|x-y| for n = 2.
inline double gamma_laplace(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("gamma_laplace: dimension mismatch or n < 2");
  const int n = static_cast<int>(x.size());
  double d2 = 0.0;
  for (int j = 0; j < n; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
  if (d2 == 0.0) throw std::invalid_argument("gamma_laplace: x = y");
  const double d = std::sqrt(d2);
  if (n == 2) return std::log(d) / (2.0 * std::numbers::pi);
  return std::pow(d, 2 - n) / (sphere_surface_measure(n) * (2 - n));
}

/// Zonal harmonic Z^{(k)}(u), the projection kernel of L^2(S^{n-1}) onto the
/// degree-k spherical harmonics. Gegenbauer closed form for n >= 3:
///   Z = ((2k+n-2)/((n-2) omega_n)) C_k^{(n-2)/2}(u);
/// on the circle: 1/(2 pi) for k = 0 and cos(k arccos u)/pi for k >= 1.
inline double zonal_kernel(const ZonalQuery& q) {
  q.validate();
  if (q.n == 2) {
    if (q.k == 0) return 1.0 / (2.0 * std::numbers::pi);
    // Chebyshev recurrence for cos(k arccos u)
    double tm1 = 1.0, tc = q.u;
    for (int m = 1; m < q.k; ++m) {
      const double tp = 2.0 * q.u * tc - tm1;
      tm1 = tc;
      tc = tp;
    }
    return tc / std::numbers::pi;
  }
  const double lambda = 0.5 * (q.n - 2);
  double cm1 = 1.0;  // C_0
  double cc = 2.0 * lambda * q.u;
  if (q.k == 0) cc = cm1;
  for (int m = 2; m <= q.k; ++m) {
    const double cp = (2.0 * q.u * (m + lambda - 1.0) * cc - (m + 2.0 * lambda - 2.0) * cm1) / m;
    cm1 = cc;
    cc = cp;
  }
  return (2.0 * q.k + q.n - 2.0) / ((q.n - 2.0) * sphere_surface_measure(q.n)) * cc;
}

/// Partial sum of the zonal-harmonic expansion of Gamma around x = 0:
///   sum_{k<=K} (|x|^k / |y|^{k+n-2}) Z_k(x'.y'),
/// with Z_k = -(2k+n-2)^{-1} Z^{(k)} when 2k+n-2 > 0 and the n = 2, k = 0
/// term equal to (2 pi)^{-1} log|y|. For x = 0 only the k = 0 term
/// contributes and the direction x' is immaterial.
inline double laplace_series_partial(std::span<const double> x, std::span<const double> y,
                                     int K) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("laplace_series_partial: dimension mismatch or n < 2");
  if (K < 0) throw std::invalid_argument("laplace_series_partial: K >= 0 required");
  const int n = static_cast<int>(x.size());
  double nx2 = 0.0, ny2 = 0.0, dot = 0.0;
  for (int j = 0; j < n; ++j) {
    nx2 += x[j] * x[j];
    ny2 += y[j] * y[j];
    dot += x[j] * y[j];
  }
  const double nx = std::sqrt(nx2), ny = std::sqrt(ny2);
  if (!(nx < ny)) throw std::invalid_argument("laplace_series_partial: |x| < |y| required");

  NeumaierSum acc;
  // k = 0 term
  if (n == 2) {
    acc.add(std::log(ny) / (2.0 * std::numbers::pi) / std::pow(ny, n - 2));
  } else {
    acc.add(-zonal_kernel({0, n, 1.0}) / (n - 2.0) / std::pow(ny, n - 2));
  }
  if (nx == 0.0 || K == 0) return acc.value();

  const double u = std::clamp(dot / (nx * ny), -1.0, 1.0);
  const double ratio = nx / ny;
  double radial = std::pow(ny, 2 - n);  // |x|^k / |y|^{k+n-2}, running
  for (int k = 1; k <= K; ++k) {
    radial *= ratio;
    acc.add(-radial / (2.0 * k + n - 2.0) * zonal_kernel({k, n, u}));
  }
  return acc.value();
}

using SpatialFn = std::function<double(std::span<const double>)>;

/// Finite-difference residual of the Kelvin conjugation identity
///   Delta v(x) = |x|^{-n-2} Delta u(x/|x|^2), v(x) = |x|^{2-n} u(x/|x|^2).
/// Both Laplacians by central second differences; expected O(h^2).
inline double kelvin_conjugation_residual(const SpatialFn& u, std::span<const double> x,
                                          double h) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("kelvin_conjugation_residual: n >= 2 required");
  if (!(h > 0.0) || h > 1e-2)
    throw std::invalid_argument("kelvin_conjugation_residual: need 0 < h <= 1e-2");
  double nx2 = 0.0;
  for (int j = 0; j < n; ++j) nx2 += x[j] * x[j];
  if (nx2 == 0.0) throw std::invalid_argument("kelvin_conjugation_residual: x = 0");

  auto v = [&u, n](std::span<const double> p) -> double {
    double p2 = 0.0;
    for (int j = 0; j < n; ++j) p2 += p[j] * p[j];
    if (p2 == 0.0) throw std::invalid_argument("Kelvin transformation: x = 0");
    std::vector<double> inv(p.size());
    for (int j = 0; j < n; ++j) inv[j] = p[j] / p2;
    return std::pow(std::sqrt(p2), 2 - n) * u(inv);
  };

  auto fd_laplacian = [n, h](auto&& f, std::span<const double> p) {
    std::vector<double> pt(p.begin(), p.end());
    const double center = f(pt);
    double lap = 0.0;
    for (int j = 0; j < n; ++j) {
      pt[j] = p[j] + h;
      const double fp = f(pt);
      pt[j] = p[j] - h;
      const double fm = f(pt);
      pt[j] = p[j];
      lap += (fp - 2.0 * center + fm) / (h * h);
    }
    return lap;
  };

  std::vector<double> inv(x.size());
  for (int j = 0; j < n; ++j) inv[j] = x[j] / nx2;
  const double lhs = fd_laplacian(v, x);
  const double rhs = std::pow(std::sqrt(nx2), -n - 2.0) * fd_laplacian(u, inv);
  return std::abs(lhs - rhs);
}

/// Smooth compactly supported test function with analytic Laplacian and a
/// known support box.
struct EllipticTestFunction {
  SpatialFn value;
  SpatialFn laplacian;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
};

struct LaplaceQuadSpec {
  int radial_order = 160;
  int angular_order = 128;  // trapezoid points on the circle / azimuth
  int polar_order = 64;     // Gauss-Legendre in cos(theta), n = 3 only
};

/// Residual |phi(x) - int Gamma(x,y) Delta phi(y) dy| of the representation
/// identity, n in {2,3}. Polar coordinates centered at x absorb the kernel
/// singularity: the radial factor Gamma(r) r^{n-1} is -r/(4 pi) for n = 3 and
/// r log r/(2 pi) for n = 2 (the latter integrated under r = R tau^3).
inline double laplace_representation_residual(const EllipticTestFunction& phi,
                                              std::span<const double> x,
                                              const LaplaceQuadSpec& spec = {}) {
  const int n = static_cast<int>(x.size());
  if (n != 2 && n != 3)
    throw std::invalid_argument("laplace_representation_residual: n in {2,3} required");
  if (phi.box_lo.size() != x.size() || phi.box_hi.size() != x.size())
    throw std::invalid_argument("laplace_representation_residual: support box required");
  for (int j = 0; j < n; ++j) {
    if (!(phi.box_lo[j] < phi.box_hi[j]))
      throw std::invalid_argument("laplace_representation_residual: support box required");
  }
  if (!phi.value || !phi.laplacian)
    throw std::invalid_argument("laplace_representation_residual: test function incomplete");

  // radius covering the whole support box from x
  double rmax2 = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double d2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = (corner >> j) & 1 ? phi.box_hi[j] : phi.box_lo[j];
      d2 += (c - x[j]) * (c - x[j]);
    }
    rmax2 = std::max(rmax2, d2);
  }
  const double rmax = std::sqrt(rmax2);

  // angular average of Delta phi at radius r around x
  std::vector<double> pt(n);
  auto angular_sum = [&](double r) {
    NeumaierSum acc;
    if (n == 2) {
      const int m = spec.angular_order;
      for (int i = 0; i < m; ++i) {
        const double th = 2.0 * std::numbers::pi * i / m;
        pt[0] = x[0] + r * std::cos(th);
        pt[1] = x[1] + r * std::sin(th);
        acc.add(phi.laplacian(pt) * (2.0 * std::numbers::pi / m));
      }
    } else {
      const QuadratureRule& mu_rule = gauss_legendre(spec.polar_order);
      const int m = spec.angular_order;
      for (int a = 0; a < spec.polar_order; ++a) {
        const double mu = mu_rule.nodes[a];  // cos(theta)
        const double sin_th = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int i = 0; i < m; ++i) {
          const double ph = 2.0 * std::numbers::pi * i / m;
          pt[0] = x[0] + r * sin_th * std::cos(ph);
          pt[1] = x[1] + r * sin_th * std::sin(ph);
          pt[2] = x[2] + r * mu;
          acc.add(phi.laplacian(pt) * mu_rule.weights[a] * (2.0 * std::numbers::pi / m));
        }
      }
    }
    return acc.value();
  };

  NeumaierSum integral;
  if (n == 3) {
    const QuadratureRule r_rule = gauss_legendre_on(spec.radial_order, 0.0, rmax);
    for (int i = 0; i < spec.radial_order; ++i) {
      const double r = r_rule.nodes[i];
      integral.add(r_rule.weights[i] * (-r / (4.0 * std::numbers::pi)) * angular_sum(r));
    }
  } else {
    // r = rmax tau^3 flattens the log endpoint
    const QuadratureRule tau_rule = gauss_legendre_on(spec.radial_order, 0.0, 1.0);
    for (int i = 0; i < spec.radial_order; ++i) {
      const double tau = tau_rule.nodes[i];
      const double r = rmax * tau * tau * tau;
      const double dr = 3.0 * rmax * tau * tau;
      if (r == 0.0) continue;
      integral.add(tau_rule.weights[i] * dr * (r * std::log(r) / (2.0 * std::numbers::pi)) *
                   angular_sum(r));
    }
  }
  return std::abs(phi.value(x) - integral.value());
}

}  // namespace hermex
