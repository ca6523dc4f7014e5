// Command-line front door: verification suites, error-vs-truncation tables
// and benchmark reports as CSV/JSON.
#pragma once

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "hermex/bump.hpp"
#include "hermex/caloric.hpp"
#include "hermex/fastsum.hpp"
#include "hermex/heat_kernel.hpp"
#include "hermex/laplace.hpp"
#include "hermex/point_io.hpp"
#include "hermex/projection.hpp"

namespace hermex::cli {

enum class Command {
  kernel_eval,
  taylor_error,
  mehler_check,
  caloric_verify,
  laplace_error,
  fastsum_bench,
  convolution_check,
};

struct RunConfig {
  Command command = Command::kernel_eval;
  int n = 1;
  double tol = 1e-10;
  int K = 48;
  std::uint64_t seed = 42;
  std::string out;  // empty: stdout
  std::string format = "csv";
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Table of records with a fixed column order; CSV uses a header row and
/// 17-significant-digit floats, JSON mirrors the same records.
class Report {
 public:
  explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(nlohmann::ordered_json row) { rows_.push_back(std::move(row)); }

  void write(const std::string& path, const std::string& format) const {
    if (path.empty()) {
      emit(std::cout, format);
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file: " + path);
      emit(out, format);
    }
  }

  std::size_t size() const { return rows_.size(); }

 private:
  void emit(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      nlohmann::ordered_json doc = nlohmann::ordered_json::array();
      for (const auto& row : rows_) doc.push_back(row);
      os << doc.dump(2) << '\n';
      return;
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) os << ',';
      os << columns_[c];
    }
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (c) os << ',';
        const auto& cell = row.at(columns_[c]);
        if (cell.is_number_float()) {
          os << detail::fmt17(cell.get<double>());
        } else if (cell.is_string()) {
          os << cell.get<std::string>();
        } else {
          os << cell.dump();
        }
      }
      os << '\n';
    }
  }

  std::vector<std::string> columns_;
  std::vector<nlohmann::ordered_json> rows_;
};

namespace detail {

inline int run_kernel_eval(const RunConfig& cfg, const std::vector<double>& x, double t,
                           const std::vector<double>& y, double s) {
  const double value = gaussian_backward(x, t, y, s);
  std::printf("%.17g\n", value);
  if (!cfg.out.empty() || cfg.format == "json") {
    Report report({"n", "t", "s", "value"});
    nlohmann::ordered_json row;
    row["n"] = static_cast<int>(x.size());
    row["t"] = t;
    row["s"] = s;
    row["value"] = value;
    report.add_row(std::move(row));
    if (!cfg.out.empty()) report.write(cfg.out, cfg.format);
  }
  return 0;
}

inline int run_taylor_error(const RunConfig& cfg) {
  Report report({"n", "t_over_s", "K", "rel_error"});
  bool ok = true;
  const int points = 6;
  for (int r = 1; r <= 9; ++r) {
    const double ratio = 0.1 * r;
    std::mt19937_64 rng(cfg.seed + r);
    std::vector<std::vector<double>> xs(points), ys(points);
    std::vector<double> ss(points), exact(points);
    for (int p = 0; p < points; ++p) {
      xs[p].resize(cfg.n);
      ys[p].resize(cfg.n);
      for (int j = 0; j < cfg.n; ++j) {
        xs[p][j] = uniform(rng, -2.0, 2.0);
        ys[p][j] = uniform(rng, -2.0, 2.0);
      }
      ss[p] = uniform(rng, 0.5, 2.0);
      exact[p] = gaussian_backward(xs[p], ratio * ss[p], ys[p], ss[p]);
    }
    std::vector<TaylorSeries> series;
    series.reserve(points);
    for (int p = 0; p < points; ++p) {
      series.emplace_back(xs[p], ratio * ss[p], ys[p], ss[p]);
    }
    double running_min = std::numeric_limits<double>::infinity();
    const int K_cap = 1024;
    for (int K = 0; K <= K_cap; K += 4) {
      // guarded denominator: strict relative error is floored by series
      // cancellation when the kernel value is exponentially small
      double rel = 0.0;
      for (int p = 0; p < points; ++p) {
        rel = std::max(rel,
                       std::abs(series[p].partial(K) - exact[p]) / std::max(1.0, exact[p]));
      }
      rel = std::max(rel, 1e-15);
      nlohmann::ordered_json row;
      row["n"] = cfg.n;
      row["t_over_s"] = ratio;
      row["K"] = K;
      row["rel_error"] = rel;
      report.add_row(std::move(row));
      // decay check: the error envelope may wiggle locally but must not grow
      if (K > 0 && rel > 10.0 * running_min) ok = false;
      running_min = std::min(running_min, rel);
      if (rel <= cfg.tol) break;
      if (K == K_cap) ok = false;  // tolerance not reached
    }
  }
  report.write(cfg.out, cfg.format);
  return ok ? 0 : 1;
}

inline int run_mehler_check(const RunConfig& cfg, int trials) {
  Report report({"n", "xi", "K_used", "rel_error"});
  std::mt19937_64 rng(cfg.seed);
  bool ok = true;
  for (int trial = 0; trial < trials; ++trial) {
    MehlerQuery q;
    const int n = 1 + static_cast<int>(rng() % 3);
    q.x.resize(n);
    q.y.resize(n);
    for (int j = 0; j < n; ++j) {
      q.x[j] = uniform(rng, -2.0, 2.0);
      q.y[j] = uniform(rng, -2.0, 2.0);
    }
    q.xi = uniform(rng, -0.9, 0.9);
    const double closed = mehler_closed(q);
    const auto part = mehler_adaptive(q);
    const double rel = std::abs(part.value - closed) / std::max(1.0, std::abs(closed));
    if (!part.converged || rel > 1e-9) ok = false;
    nlohmann::ordered_json row;
    row["n"] = n;
    row["xi"] = q.xi;
    row["K_used"] = part.degrees_used;
    row["rel_error"] = rel;
    report.add_row(std::move(row));
  }
  report.write(cfg.out, cfg.format);
  return ok ? 0 : 1;
}

inline int run_caloric_verify(const RunConfig& cfg, int max_degree) {
  Report report({"alpha", "degree", "terms", "caloric_zero", "homogeneous"});
  bool ok = true;
  for (int k = 0; k <= max_degree; ++k) {
    for (const auto& alpha : multi_indices(cfg.n, k)) {
      const auto p = q_alpha(alpha);
      const bool zero = heat_operator_apply(p).is_zero();
      const bool homog = is_parabolically_homogeneous(p);
      ok = ok && zero && homog;
      std::string name = "(";
      for (int j = 0; j < alpha.dim(); ++j) {
        if (j) name += ' ';
        name += std::to_string(alpha.entries[j]);
      }
      name += ")";
      std::printf("Q_%s = %s\n", name.c_str(), to_string(p).c_str());
      nlohmann::ordered_json row;
      row["alpha"] = name;
      row["degree"] = p.degree;
      row["terms"] = static_cast<int>(p.terms.size());
      row["caloric_zero"] = zero;
      row["homogeneous"] = homog;
      report.add_row(std::move(row));
    }
  }
  if (!cfg.out.empty()) report.write(cfg.out, cfg.format);
  return ok ? 0 : 1;
}

inline int run_laplace_error(const RunConfig& cfg) {
  Report report({"n", "ratio", "K", "rel_error"});
  bool ok = true;
  for (int r = 1; r <= 5; ++r) {
    const double ratio = 0.1 * r;
    std::mt19937_64 rng(cfg.seed + r);
    const int points = 6;
    std::vector<std::vector<double>> xs(points), ys(points);
    std::vector<double> exact(points);
    for (int p = 0; p < points; ++p) {
      xs[p].resize(cfg.n);
      ys[p].resize(cfg.n);
      double ny = 0.0;
      for (int j = 0; j < cfg.n; ++j) {
        ys[p][j] = uniform(rng, -1.0, 1.0);
        ny += ys[p][j] * ys[p][j];
      }
      ny = std::sqrt(ny);
      const double scale_y = uniform(rng, 0.8, 2.0) / std::max(ny, 1e-9);
      ny = 0.0;
      for (int j = 0; j < cfg.n; ++j) {
        ys[p][j] *= scale_y;
        ny += ys[p][j] * ys[p][j];
      }
      ny = std::sqrt(ny);
      double nx = 0.0;
      for (int j = 0; j < cfg.n; ++j) {
        xs[p][j] = uniform(rng, -1.0, 1.0);
        nx += xs[p][j] * xs[p][j];
      }
      nx = std::sqrt(nx);
      for (int j = 0; j < cfg.n; ++j) xs[p][j] *= ratio * ny / std::max(nx, 1e-9);
      exact[p] = gamma_laplace(xs[p], ys[p]);
    }
    for (int K = 0; K <= cfg.K; K += 4) {
      double rel = 0.0;
      for (int p = 0; p < points; ++p) {
        const double approx = laplace_series_partial(xs[p], ys[p], K);
        rel = std::max(rel, std::abs(approx - exact[p]) / std::abs(exact[p]));
      }
      rel = std::max(rel, 1e-15);
      nlohmann::ordered_json row;
      row["n"] = cfg.n;
      row["ratio"] = ratio;
      row["K"] = K;
      row["rel_error"] = rel;
      report.add_row(std::move(row));
      if (K == cfg.K && rel > 1e-10) ok = false;
    }
  }
  report.write(cfg.out, cfg.format);
  return ok ? 0 : 1;
}

inline int run_fastsum_bench(const RunConfig& cfg, std::size_t N, std::size_t M, double ratio,
                             const std::string& sources_csv, const std::string& targets_csv) {
  PointList sources, targets;
  std::vector<double> weights;
  const double s = 1.0;
  const double t = ratio * s;
  if (!sources_csv.empty()) {
    auto in = read_points_csv(sources_csv, true);
    sources = std::move(in.points);
    weights = std::move(in.weights);
    if (targets_csv.empty()) throw std::runtime_error("fastsum-bench: --targets required");
    targets = read_points_csv(targets_csv, false).points;
  } else {
    std::mt19937_64 rng(cfg.seed);
    sources.resize(N);
    targets.resize(M);
    weights.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      sources[i].resize(cfg.n);
      for (int j = 0; j < cfg.n; ++j) sources[i][j] = uniform(rng, -2.0, 2.0);
      weights[i] = uniform(rng, -1.0, 1.0);
    }
    for (std::size_t i = 0; i < M; ++i) {
      targets[i].resize(cfg.n);
      for (int j = 0; j < cfg.n; ++j) targets[i][j] = uniform(rng, -2.0, 2.0);
    }
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto direct = direct_sum(sources, weights, targets, t, s);
  const auto t1 = clock::now();
  const auto res = fast_sum(sources, weights, targets, t, s, cfg.tol);
  const auto t2 = clock::now();
  double max_err = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    max_err = std::max(max_err, std::abs(res.values[i] - direct[i]));
  }
  const double time_direct = std::chrono::duration<double>(t1 - t0).count();
  const double time_fast = std::chrono::duration<double>(t2 - t1).count();

  Report report({"n", "N", "M", "K", "max_error", "time_direct", "time_fast", "speedup"});
  nlohmann::ordered_json row;
  row["n"] = cfg.n;
  row["N"] = sources.size();
  row["M"] = targets.size();
  row["K"] = res.degree;
  row["max_error"] = max_err;
  row["time_direct"] = time_direct;
  row["time_fast"] = time_fast;
  row["speedup"] = time_fast > 0.0 ? time_direct / time_fast : 0.0;
  report.add_row(std::move(row));
  report.write(cfg.out, cfg.format);
  return max_err <= 10.0 * cfg.tol ? 0 : 1;
}

inline int run_convolution_check(const RunConfig& cfg) {
  Report report({"identity", "n", "residual"});
  bool ok = true;

  SmoothBump1D space{0.3, 1.2, {1.0, 0.5}};
  SmoothBump1D time_bump{0.6, 0.5, {1.0}};
  const auto f = make_spacetime_bump(space, time_bump);
  for (const auto& [x, t] : std::vector<std::pair<double, double>>{
           {0.3, 0.7}, {0.8, 0.45}, {-0.2, 1.3}, {2.5, 1.5}}) {
    const double resid = heat_representation_residual(f, x, t);
    ok = ok && resid <= 1e-3;
    nlohmann::ordered_json row;
    row["identity"] = "heat";
    row["n"] = 1;
    row["residual"] = resid;
    report.add_row(std::move(row));
  }

  {
    auto phi = make_bump_test_function({0.2, -0.1}, 0.9);
    for (const std::vector<double>& x : {std::vector<double>{0.4, 0.1}, {0.0, 0.0}}) {
      const double resid = laplace_representation_residual(phi, x);
      ok = ok && resid <= 1e-3;
      nlohmann::ordered_json row;
      row["identity"] = "laplace";
      row["n"] = 2;
      row["residual"] = resid;
      report.add_row(std::move(row));
    }
  }
  {
    auto phi = make_bump_test_function({0.0, 0.0, 0.0}, 1.0);
    for (const std::vector<double>& x :
         {std::vector<double>{0.0, 0.0, 0.0}, {0.3, -0.2, 0.1}}) {
      const double resid = laplace_representation_residual(phi, x);
      ok = ok && resid <= 1e-3;
      nlohmann::ordered_json row;
      row["identity"] = "laplace";
      row["n"] = 3;
      row["residual"] = resid;
      report.add_row(std::move(row));
    }
  }
  report.write(cfg.out, cfg.format);
  return ok ? 0 : 1;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Hermite expansions of the Gaussian kernel: verification suites and benchmarks"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.format = "csv";

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output file (default: stdout)");
    sub->add_option("--format", cfg.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "seed for randomized suites");
  };

  // kernel-eval
  auto* eval = app.add_subcommand("kernel-eval", "closed-form backward Gaussian evaluation");
  std::vector<double> ke_x{0.0}, ke_y{0.0};
  double ke_t = 0.0, ke_s = 1.0;
  int ke_n = 1;
  eval->add_option("--n", ke_n, "dimension");
  eval->add_option("--x", ke_x, "target point, comma separated")->delimiter(',');
  eval->add_option("--y", ke_y, "source point, comma separated")->delimiter(',');
  eval->add_option("--t", ke_t, "target time");
  eval->add_option("--s", ke_s, "source time");
  add_common(eval);

  // taylor-error
  auto* taylor = app.add_subcommand("taylor-error", "series error vs truncation degree");
  taylor->add_option("--n", cfg.n, "dimension")->check(CLI::Range(1, 3));
  taylor->add_option("--tol", cfg.tol, "target relative error");
  add_common(taylor);

  // mehler-check
  auto* mehler = app.add_subcommand("mehler-check", "generating-formula identity check");
  int mehler_trials = 500;
  mehler->add_option("--trials", mehler_trials, "number of random tuples");
  add_common(mehler);

  // caloric-verify
  auto* caloric = app.add_subcommand("caloric-verify", "print Q_alpha, assert exact caloricity");
  int caloric_degree = 6;
  caloric->add_option("--n", cfg.n, "dimension")->check(CLI::Range(1, 3));
  caloric->add_option("--max-degree", caloric_degree, "largest |alpha|");
  add_common(caloric);

  // laplace-error
  auto* laplace = app.add_subcommand("laplace-error", "zonal series error vs truncation");
  laplace->add_option("--n", cfg.n, "dimension")->check(CLI::Range(2, 3));
  laplace->add_option("--K", cfg.K, "largest truncation degree");
  add_common(laplace);

  // fastsum-bench
  auto* bench = app.add_subcommand("fastsum-bench", "fast summation vs direct sum");
  std::size_t bench_N = 1024, bench_M = 1024;
  double bench_ratio = 0.5;
  double bench_tol = 1e-7;
  std::string bench_sources, bench_targets;
  bench->add_option("--n", cfg.n, "dimension")->check(CLI::Range(1, 2));
  bench->add_option("--N", bench_N, "source count (generated instance)");
  bench->add_option("--M", bench_M, "target count (generated instance)");
  bench->add_option("--ratio", bench_ratio, "t/s")->check(CLI::Range(0.0, 0.99));
  bench->add_option("--tol", bench_tol, "target max-abs error");
  bench->add_option("--sources", bench_sources, "CSV: one source per row, weight last column");
  bench->add_option("--targets", bench_targets, "CSV: one target per row");
  add_common(bench);

  // convolution-check
  auto* conv = app.add_subcommand("convolution-check", "representation-identity residuals");
  add_common(conv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (eval->parsed()) {
      if (static_cast<int>(ke_x.size()) != ke_n || static_cast<int>(ke_y.size()) != ke_n)
        throw std::runtime_error("kernel-eval: --x/--y must have n entries");
      cfg.command = Command::kernel_eval;
      return detail::run_kernel_eval(cfg, ke_x, ke_t, ke_y, ke_s);
    }
    if (taylor->parsed()) {
      cfg.command = Command::taylor_error;
      return detail::run_taylor_error(cfg);
    }
    if (mehler->parsed()) {
      cfg.command = Command::mehler_check;
      return detail::run_mehler_check(cfg, mehler_trials);
    }
    if (caloric->parsed()) {
      cfg.command = Command::caloric_verify;
      return detail::run_caloric_verify(cfg, caloric_degree);
    }
    if (laplace->parsed()) {
      cfg.command = Command::laplace_error;
      return detail::run_laplace_error(cfg);
    }
    if (bench->parsed()) {
      cfg.command = Command::fastsum_bench;
      cfg.tol = bench_tol;
      return detail::run_fastsum_bench(cfg, bench_N, bench_M, bench_ratio, bench_sources,
                                       bench_targets);
    }
    cfg.command = Command::convolution_check;
    return detail::run_convolution_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace hermex::cli
