#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hermex/heat_kernel.hpp"
#include "hermex/laplace.hpp"

namespace hermex {

namespace detail {

/// Profile g(sigma) = exp(1 - 1/(1-sigma)) on sigma in [0,1), extended by 0;
/// C-infinity across sigma = 1. Returns {g, g', g''}.
struct BumpProfile {
  double g = 0.0, g1 = 0.0, g2 = 0.0;
};

inline BumpProfile bump_profile(double sigma) {
  BumpProfile p;
  if (sigma >= 1.0) return p;
  const double w = 1.0 / (1.0 - sigma);
  p.g = std::exp(1.0 - w);
  p.g1 = -p.g * w * w;
  p.g2 = p.g * (w * w * w * w - 2.0 * w * w * w);
  return p;
}

}  // namespace detail

/// One-dimensional C-infinity bump centered at `center` with support radius
/// `radius`, optionally multiplied by a polynomial (coefficients ascending in
/// (y - center)). Value and first two derivatives are analytic.
struct SmoothBump1D {
  double center = 0.0;
  double radius = 1.0;
  std::vector<double> poly = {1.0};

  double value(double y) const { return eval(y).f; }
  double d1(double y) const { return eval(y).f1; }
  double d2(double y) const { return eval(y).f2; }

 private:
  struct Jet {
    double f = 0.0, f1 = 0.0, f2 = 0.0;
  };

  Jet eval(double y) const {
    if (!(radius > 0.0)) throw std::invalid_argument("SmoothBump1D: radius > 0 required");
    const double z = y - center;
    const double sigma = z * z / (radius * radius);
    const auto b = detail::bump_profile(sigma);
    Jet out;
    if (b.g == 0.0) return out;
    const double ds = 2.0 * z / (radius * radius);
    const double B = b.g;
    const double B1 = b.g1 * ds;
    const double B2 = b.g2 * ds * ds + b.g1 * 2.0 / (radius * radius);
    // polynomial in z, Horner with derivatives
    double p = 0.0, p1 = 0.0, p2 = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
      p2 = p2 * z + 2.0 * p1;
      p1 = p1 * z + p;
      p = p * z + *it;
    }
    out.f = p * B;
    out.f1 = p1 * B + p * B1;
    out.f2 = p2 * B + 2.0 * p1 * B1 + p * B2;
    return out;
  }
};

/// Radial C-infinity bump on R^n with analytic Laplacian.
struct RadialBump {
  std::vector<double> center;
  double radius = 1.0;
  double amplitude = 1.0;

  double value(std::span<const double> y) const {
    return amplitude * detail::bump_profile(sigma(y)).g;
  }

  double laplacian(std::span<const double> y) const {
    const int n = static_cast<int>(center.size());
    const double s = sigma(y);
    const auto b = detail::bump_profile(s);
    if (b.g == 0.0) return 0.0;
    const double r2 = radius * radius;
    return amplitude * (b.g2 * 4.0 * s / r2 + b.g1 * 2.0 * n / r2);
  }

 private:
  double sigma(std::span<const double> y) const {
    if (y.size() != center.size()) throw std::invalid_argument("RadialBump: dimension mismatch");
    if (!(radius > 0.0)) throw std::invalid_argument("RadialBump: radius > 0 required");
    double d2 = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) d2 += (y[j] - center[j]) * (y[j] - center[j]);
    return d2 / (radius * radius);
  }
};

/// EllipticTestFunction for a radial bump, support box = the bounding cube.
inline EllipticTestFunction make_bump_test_function(std::vector<double> center, double radius,
                                                    double amplitude = 1.0) {
  RadialBump bump{center, radius, amplitude};
  EllipticTestFunction f;
  f.box_lo.resize(center.size());
  f.box_hi.resize(center.size());
  for (std::size_t j = 0; j < center.size(); ++j) {
    f.box_lo[j] = center[j] - radius;
    f.box_hi[j] = center[j] + radius;
  }
  f.value = [bump](std::span<const double> y) { return bump.value(y); };
  f.laplacian = [bump](std::span<const double> y) { return bump.laplacian(y); };
  return f;
}

/// Separable space-time test function f(y,s) = by(y) * bs(s) on R x R with
/// analytic heat deficit (d_yy - d_s) f.
inline SpaceTimeTestFunction make_spacetime_bump(SmoothBump1D space, SmoothBump1D time) {
  SpaceTimeTestFunction f;
  f.y_lo = space.center - space.radius;
  f.y_hi = space.center + space.radius;
  f.s_lo = time.center - time.radius;
  f.s_hi = time.center + time.radius;
  f.value = [space, time](double y, double s) { return space.value(y) * time.value(s); };
  f.heat_deficit = [space, time](double y, double s) {
    return space.d2(y) * time.value(s) - space.value(y) * time.d1(s);
  };
  return f;
}

}  // namespace hermex
