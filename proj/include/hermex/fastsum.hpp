#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hermex/caloric.hpp"
#include "hermex/heat_kernel.hpp"
#include "hermex/hermite.hpp"
#include "hermex/multi_index.hpp"
#include "hermex/summation.hpp"

namespace hermex {

using PointList = std::vector<std::vector<double>>;

/// Per-multi-index weighted source sums for the separable Gaussian sum:
///   M_alpha = sum_j q_j s^{-(|alpha|+n)/2} phi_alpha(y_j/2 sqrt(s))
///             e^{-|y_j|^2/8s},
/// stored in the canonical degree-major graded-lex order up to max_degree.
struct MomentTable {
  int dimension = 0;
  double s = 0.0;
  int max_degree = 0;
  std::vector<double> moments;
  std::size_t source_count = 0;

  /// Lookup by multi-index (linear scan of the canonical enumeration).
  double moment(const MultiIndex& alpha) const {
    if (alpha.dim() != dimension) throw std::invalid_argument("moment: dimension mismatch");
    const int k = alpha.degree();
    if (k > max_degree) throw std::invalid_argument("moment: degree beyond table");
    std::size_t idx = 0;
    for (int d = 0; d < k; ++d) idx += multi_index_count(dimension, d);
    std::vector<int> c(dimension);
    first_composition(k, c);
    do {
      if (std::equal(c.begin(), c.end(), alpha.entries.begin())) return moments[idx];
      ++idx;
    } while (next_composition(c));
    throw std::logic_error("moment: enumeration exhausted");  // unreachable
  }
};

namespace detail {

inline void check_points(const PointList& pts, int n, const char* who) {
  for (const auto& p : pts) {
    if (static_cast<int>(p.size()) != n) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace detail

/// Accumulates the moment table over sources in the given (fixed) order with
/// compensated summation; deterministic. Empty source list yields all-zero
/// moments.
inline MomentTable compute_moments(const PointList& sources, std::span<const double> weights,
                                   double s, int K) {
  if (!(s > 0.0)) throw std::invalid_argument("compute_moments: s > 0 required");
  if (K < 0) throw std::invalid_argument("compute_moments: K >= 0 required");
  if (sources.size() != weights.size())
    throw std::invalid_argument("compute_moments: sources/weights length mismatch");
  const int n = sources.empty() ? 1 : static_cast<int>(sources.front().size());
  detail::check_points(sources, n, "compute_moments");

  MomentTable table;
  table.dimension = n;
  table.s = s;
  table.max_degree = K;
  table.source_count = sources.size();
  const std::size_t count = multi_index_count_upto(n, K);
  std::vector<NeumaierSum> acc(count);

  const double rs = std::sqrt(s);
  std::vector<std::vector<double>> c(n);  // c[j][m] = s^{-(m+1)/2} h_m(z_j) e^{-z_j^2/2}
  std::vector<int> alpha(n);
  for (std::size_t src = 0; src < sources.size(); ++src) {
    const auto& y = sources[src];
    for (int j = 0; j < n; ++j) {
      const double z = y[j] / (2.0 * rs);
      const auto h = hermite_function_sequence(K, z).values;
      c[j].resize(K + 1);
      double spow = 1.0 / rs;  // s^{-(m+1)/2}
      const double gz = std::exp(-0.5 * z * z);
      for (int m = 0; m <= K; ++m) {
        c[j][m] = spow * h[m] * gz;
        spow /= rs;
      }
    }
    std::size_t idx = 0;
    for (int k = 0; k <= K; ++k) {
      first_composition(k, alpha);
      do {
        double p = weights[src];
        for (int j = 0; j < n; ++j) p *= c[j][alpha[j]];
        acc[idx].add(p);
        ++idx;
      } while (next_composition(alpha));
    }
  }
  table.moments.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    table.moments[i] = acc[i].value();
    if (!std::isfinite(table.moments[i]))
      throw std::runtime_error("compute_moments: non-finite moment");
  }
  return table;
}

/// For each target x_i returns
///   4^{-n/2} sum_{k<=K} sum_{|alpha|=k} Q_alpha(x_i, t) M_alpha,
/// with Q_alpha evaluated through the per-coordinate caloric Hermite
/// recurrence. Cost O(#targets * #indices). Targets may be processed in
/// parallel; each target's accumulation order is fixed, so results are
/// bitwise independent of the schedule.
inline std::vector<double> evaluate_targets(const MomentTable& table, const PointList& targets,
                                            double t) {
  const int n = table.dimension;
  if (!(std::abs(t) < table.s))
    throw std::invalid_argument("evaluate_targets: |t| < s required");
  detail::check_points(targets, n, "evaluate_targets");
  const int K = table.max_degree;
  const double scale = std::pow(4.0, -0.5 * n);

  std::vector<double> out(targets.size());
  auto worker = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::vector<double>> q(n);
    std::vector<int> alpha(n);
    for (std::size_t i = lo; i < hi; ++i) {
      for (int j = 0; j < n; ++j) q[j] = caloric_hermite_sequence(targets[i][j], t, K);
      NeumaierSum acc;
      std::size_t idx = 0;
      for (int k = 0; k <= K; ++k) {
        first_composition(k, alpha);
        do {
          double p = table.moments[idx];
          for (int j = 0; j < n; ++j) p *= q[j][alpha[j]];
          acc.add(p);
          ++idx;
        } while (next_composition(alpha));
      }
      out[i] = scale * acc.value();
    }
  };

  const std::size_t m = targets.size();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (m < 512 || hw == 1) {
    worker(0, m);
  } else {
    const std::size_t chunk = (m + hw - 1) / hw;
    std::vector<std::thread> pool;
    for (std::size_t lo = 0; lo < m; lo += chunk) {
      pool.emplace_back(worker, lo, std::min(m, lo + chunk));
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

/// Exact O(N*M) reference: sum_j q_j G_b(x_i, t, y_j, s).
inline std::vector<double> direct_sum(const PointList& sources, std::span<const double> weights,
                                      const PointList& targets, double t, double s) {
  if (!(t < s)) throw std::invalid_argument("direct_sum: t < s required");
  if (sources.size() != weights.size())
    throw std::invalid_argument("direct_sum: sources/weights length mismatch");
  const int n = sources.empty() ? (targets.empty() ? 1 : static_cast<int>(targets.front().size()))
                                : static_cast<int>(sources.front().size());
  detail::check_points(sources, n, "direct_sum");
  detail::check_points(targets, n, "direct_sum");
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    NeumaierSum acc;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      acc.add(weights[j] * gaussian_backward(targets[i], t, sources[j], s));
    }
    out[i] = acc.value();
  }
  return out;
}

/// Empirical truncation model, constants frozen from a calibration run
/// (tests/test_fastsum.cpp keeps the regression snapshot). Two channels per
/// truncation degree K, evaluated at the first untruncated degree K+1:
///   geometric   1.5 sqrt(count(n,K+1)) ratio^{(K+1)/2}
///   factorial   count(n,K+1) zeta^{K+1} / sqrt((K+1)!),  zeta = radii/sqrt(2)
/// The factorial channel is what survives as ratio -> 0. radii is the
/// coordinate-norm scale max(|x|, |y|) / sqrt(s). The returned K is the
/// smallest whose predicted error is <= tol.
inline int choose_degree(double tol, double ratio, double radii, int n, int K_max = 200) {
  if (!(tol > 0.0)) throw std::invalid_argument("choose_degree: tol > 0 required");
  if (!(ratio >= 0.0) || ratio >= 1.0)
    throw std::invalid_argument("choose_degree: 0 <= ratio < 1 required");
  if (std::isinf(tol)) return 0;
  const double log_zeta = std::log(std::max(radii, 1e-6) / std::sqrt(2.0));
  const double log_tol = std::log(tol);
  for (int K = 0; K < K_max; ++K) {
    const double log_count = std::log(static_cast<double>(multi_index_count(n, K + 1)));
    const double log_geo = ratio > 0.0
                               ? std::log(1.5) + 0.5 * log_count + 0.5 * (K + 1) * std::log(ratio)
                               : -std::numeric_limits<double>::infinity();
    const double log_fac = log_count + (K + 1) * log_zeta - 0.5 * std::lgamma(K + 2.0);
    const double log_err = std::max(log_geo, log_fac) + 0.7;  // +ln 2 headroom for the sum
    if (log_err <= log_tol) return K;
  }
  return K_max;
}

struct FastSumResult {
  std::vector<double> values;
  int degree = 0;
  MomentTable table;
};

/// Degree selection with the post-hoc check the model alone cannot give:
/// the chosen K is validated on a deterministic sample of up to 64 targets
/// against direct_sum and bumped until the sampled max-abs error is <= tol.
inline FastSumResult fast_sum(const PointList& sources, std::span<const double> weights,
                              const PointList& targets, double t, double s, double tol,
                              int K_max = 200) {
  if (!(s > 0.0) || !(std::abs(t) < s))
    throw std::invalid_argument("fast_sum: s > 0 and |t| < s required");
  const int n = sources.empty() ? (targets.empty() ? 1 : static_cast<int>(targets.front().size()))
                                : static_cast<int>(sources.front().size());
  double radii = 0.0;
  auto scan = [&radii](const PointList& pts) {
    for (const auto& p : pts) {
      double n2 = 0.0;
      for (double v : p) n2 += v * v;
      radii = std::max(radii, std::sqrt(n2));
    }
  };
  scan(sources);
  scan(targets);
  const double ratio = std::abs(t) / s;

  // deterministic validation sample
  std::vector<std::size_t> sample;
  if (!targets.empty()) {
    std::mt19937_64 rng(0x5a17u);
    const std::size_t want = std::min<std::size_t>(64, targets.size());
    for (std::size_t i = 0; i < want; ++i) {
      sample.push_back(rng() % targets.size());
    }
  }
  PointList sample_targets;
  sample_targets.reserve(sample.size());
  for (auto i : sample) sample_targets.push_back(targets[i]);
  const std::vector<double> reference =
      sample_targets.empty() ? std::vector<double>{}
                             : direct_sum(sources, weights, sample_targets, t, s);

  int K = choose_degree(tol, ratio, radii / std::sqrt(s), n, K_max);
  FastSumResult res;
  while (true) {
    res.table = compute_moments(sources, weights, s, K);
    bool ok = true;
    if (!sample_targets.empty()) {
      const auto probe = evaluate_targets(res.table, sample_targets, t);
      double err = 0.0;
      for (std::size_t i = 0; i < probe.size(); ++i)
        err = std::max(err, std::abs(probe[i] - reference[i]));
      ok = err <= tol;
    }
    if (ok || K >= K_max) break;
    K = std::min(K_max, K + std::max(4, K / 4));
  }
  res.degree = K;
  res.values = evaluate_targets(res.table, targets, t);
  return res;
}

}  // namespace hermex
