#include "hermex/projection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "hermex/quadrature.hpp"
#include "oracles.hpp"

using hermex::MehlerQuery;
using hermex::mehler_adaptive;
using hermex::mehler_closed;
using hermex::mehler_partial;
using hermex::MultiIndex;
using hermex::phi_k_kernel;
using hermex::project_component;

namespace {

MehlerQuery make_query(std::vector<double> x, std::vector<double> y, double xi) {
  MehlerQuery q;
  q.x = std::move(x);
  q.y = std::move(y);
  q.xi = xi;
  return q;
}

}  // namespace

TEST(PhiKernel, DegreeZeroClosedForm) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> x(n), y(n);
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      x[j] = oracle::uniform(rng, -2.0, 2.0);
      y[j] = oracle::uniform(rng, -2.0, 2.0);
      norm2 += x[j] * x[j] + y[j] * y[j];
    }
    const double expected = std::pow(std::numbers::pi, -0.5 * n) * std::exp(-0.5 * norm2);
    EXPECT_NEAR(phi_k_kernel(0, x, y), expected, 1e-14 * expected);
  }
}

TEST(PhiKernel, DegreeOneVanishesAtOrigin) {
  const std::vector<double> x = {0.0, 0.0};
  const std::vector<double> y = {0.7, -1.2};
  EXPECT_DOUBLE_EQ(phi_k_kernel(1, x, y), 0.0);
}

TEST(PhiKernel, MatchesBruteForceEnumeration) {
  const std::vector<double> x = {0.2, -0.1};
  const std::vector<double> y = {0.4, 0.3};
  const double expected = oracle::phi_k_bruteforce(3, x, y);
  EXPECT_NEAR(phi_k_kernel(3, x, y), expected, 1e-14 * std::abs(expected));
}

TEST(PhiKernel, SymmetryInArguments) {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(n), y(n);
      for (int j = 0; j < n; ++j) {
        x[j] = oracle::uniform(rng, -2.5, 2.5);
        y[j] = oracle::uniform(rng, -2.5, 2.5);
      }
      for (int k = 0; k <= 12; ++k) {
        const double a = phi_k_kernel(k, x, y);
        const double b = phi_k_kernel(k, y, x);
        EXPECT_NEAR(a, b, 1e-14 * std::max(1e-300, std::abs(a))) << "n=" << n << " k=" << k;
      }
    }
  }
}

TEST(Mehler, XiZeroCollapsesToDegreeZero) {
  const auto q = make_query({0.3, -0.4}, {0.1, 0.9}, 0.0);
  EXPECT_NEAR(mehler_closed(q), phi_k_kernel(0, q.x, q.y), 1e-15);
  EXPECT_NEAR(mehler_partial(q, 25), phi_k_kernel(0, q.x, q.y), 1e-15);
}

TEST(Mehler, OriginClosedForm) {
  // x = y = 0, xi = 1/2, n = 1: pi^{-1/2} (3/4)^{-1/2}
  const auto q = make_query({0.0}, {0.0}, 0.5);
  const double expected = std::pow(std::numbers::pi, -0.5) / std::sqrt(0.75);
  EXPECT_NEAR(mehler_closed(q), expected, 1e-15 * expected);
}

TEST(Mehler, PartialSumConvergesToClosedForm) {
  const auto q = make_query({0.3}, {-0.2}, 0.5);
  const double closed = mehler_closed(q);
  EXPECT_NEAR(mehler_partial(q, 40), closed, 1e-10 * std::abs(closed));

  // xi = 0.9 tail: |sum_{k>K} xi^k Phi_k(1,1)| ~ 0.9^K k^{-1/2}/(1-0.9),
  // so K = 80 leaves ~5e-5 and 1e-8 relative needs K ~ 260
  const auto q9 = make_query({1.0}, {1.0}, 0.9);
  const double closed9 = mehler_closed(q9);
  EXPECT_NEAR(mehler_partial(q9, 80), closed9, 1e-4 * std::abs(closed9));
  EXPECT_GT(std::abs(mehler_partial(q9, 80) - closed9), 1e-6 * std::abs(closed9));
  EXPECT_NEAR(mehler_partial(q9, 260), closed9, 1e-8 * std::abs(closed9));
}

TEST(Mehler, GeneratingIdentityRandomSweep) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<double> x(n), y(n);
    for (int j = 0; j < n; ++j) {
      x[j] = oracle::uniform(rng, -2.0, 2.0);
      y[j] = oracle::uniform(rng, -2.0, 2.0);
    }
    const double xi = oracle::uniform(rng, -0.9, 0.9);
    const auto q = make_query(x, y, xi);
    const double closed = mehler_closed(q);
    const auto part = mehler_adaptive(q);
    EXPECT_TRUE(part.converged) << "trial " << trial;
    EXPECT_NEAR(part.value, closed, 1e-9 * std::max(1.0, std::abs(closed)))
        << "n=" << n << " xi=" << xi;
  }
}

TEST(Mehler, NegativeXiSupported) {
  const auto q = make_query({0.5, 0.2}, {-0.3, 0.8}, -0.7);
  const double closed = mehler_closed(q);
  const auto part = mehler_adaptive(q);
  EXPECT_TRUE(part.converged);
  EXPECT_NEAR(part.value, closed, 1e-10 * std::max(1.0, std::abs(closed)));
}

TEST(Mehler, RejectsXiOutsideDisc) {
  EXPECT_THROW(mehler_closed(make_query({0.0}, {0.0}, 1.0)), std::invalid_argument);
  EXPECT_THROW(mehler_partial(make_query({0.0}, {0.0}, -1.2), 4), std::invalid_argument);
}

TEST(ProjectComponent, OrthonormalityOfPhi2) {
  auto f = [](std::span<const double> p) {
    return hermex::hermite_function_sequence(2, p[0]).values[2];
  };
  const auto same = project_component(f, 1, 2, 32);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_NEAR(same[0], 1.0, 1e-10);
  const auto ortho = project_component(f, 1, 3, 32);
  EXPECT_NEAR(ortho[0], 0.0, 1e-10);
}

TEST(ProjectComponent, GaussianAgainstQuadratureOracle) {
  auto f = [](std::span<const double> p) { return std::exp(-p[0] * p[0]); };
  const auto coeff = project_component(f, 1, 0, 64);
  const double by_oracle =
      oracle::hermite_inner_product_quadrature([](double z) { return std::exp(-z * z); }, 0);
  // analytic: <e^{-x^2}, h_0> = pi^{-1/4} sqrt(2 pi / 3)
  const double analytic =
      std::pow(std::numbers::pi, -0.25) * std::sqrt(2.0 * std::numbers::pi / 3.0);
  EXPECT_NEAR(coeff[0], by_oracle, 1e-12);
  EXPECT_NEAR(coeff[0], analytic, 1e-10);
}

TEST(ProjectComponent, RefusesLowQuadratureOrder) {
  auto f = [](std::span<const double> p) { return std::exp(-p[0] * p[0]); };
  EXPECT_THROW(project_component(f, 1, 8, 17), std::invalid_argument);
  EXPECT_THROW(project_component(f, 3, 0, 64), std::invalid_argument);
}

TEST(ProjectComponent, GramMatrixIsIdentity) {
  // {phi_alpha : |alpha| <= 6} in n = 1 and n = 2 via 64-node tensor rule
  for (int n = 1; n <= 2; ++n) {
    std::vector<MultiIndex> basis;
    for (int k = 0; k <= 6; ++k) {
      auto level = hermex::multi_indices(n, k);
      basis.insert(basis.end(), level.begin(), level.end());
    }
    for (const auto& b : basis) {
      auto f = [&b](std::span<const double> p) { return hermex::phi_alpha(b, p); };
      for (int k = 0; k <= 6; ++k) {
        const auto coeffs = project_component(f, n, k, 64);
        const auto level = hermex::multi_indices(n, k);
        for (std::size_t a = 0; a < level.size(); ++a) {
          const double expected = level[a] == b ? 1.0 : 0.0;
          EXPECT_NEAR(coeffs[a], expected, 1e-10) << "n=" << n;
        }
      }
    }
  }
}

TEST(ProjectionEval, ReproducesPk) {
  // P_2 applied to phi_(2) returns phi_(2) pointwise
  auto f = [](std::span<const double> p) {
    return hermex::hermite_function_sequence(2, p[0]).values[2];
  };
  const auto coeffs = project_component(f, 1, 2, 48);
  for (double x : {-1.3, 0.0, 0.8, 2.1}) {
    const std::vector<double> pt = {x};
    EXPECT_NEAR(hermex::projection_eval(coeffs, 2, pt), f(pt), 1e-10);
  }
}

TEST(HermiteOperator, EigenrelationResidual) {
  {
    const MultiIndex a{{0}};
    const std::vector<double> x = {0.0};
    EXPECT_LE(hermex::hermite_operator_residual(a, x, 1e-3), 1e-6);
  }
  {
    const MultiIndex a{{3, 1}};
    const std::vector<double> x = {0.5, -0.5};
    EXPECT_LE(hermex::hermite_operator_residual(a, x, 1e-3), 1e-5);
  }
}

TEST(HermiteOperator, StepValidation) {
  const MultiIndex a{{1}};
  const std::vector<double> x = {0.3};
  EXPECT_THROW(hermex::hermite_operator_residual(a, x, 0.0), std::invalid_argument);
  EXPECT_THROW(hermex::hermite_operator_residual(a, x, 0.5), std::invalid_argument);
}

TEST(Quadrature, GaussHermiteIntegratesEvenMomentsExactly) {
  // int e^{-x^2} x^{2m} dx: sqrt(pi), sqrt(pi)/2, 3 sqrt(pi)/4
  const auto& rule = hermex::gauss_hermite(12);
  double sum0 = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double z = rule.nodes[i];
    sum0 += rule.weights[i];
    sum2 += rule.weights[i] * z * z;
    sum4 += rule.weights[i] * z * z * z * z;
  }
  const double rp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(sum0, rp, 1e-14);
  EXPECT_NEAR(sum2, 0.5 * rp, 1e-14);
  EXPECT_NEAR(sum4, 0.75 * rp, 1e-14);
}

TEST(Quadrature, GaussLegendreClassicNodes) {
  const auto& rule = hermex::gauss_legendre(2);
  EXPECT_NEAR(std::abs(rule.nodes[0]), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rule.weights[0], 1.0, 1e-14);
  EXPECT_NEAR(rule.weights[1], 1.0, 1e-14);
}

TEST(Quadrature, CacheSafeUnderConcurrentFirstUse) {
  std::vector<std::thread> pool;
  std::vector<const hermex::QuadratureRule*> seen(8);
  for (int i = 0; i < 8; ++i) {
    pool.emplace_back([&seen, i] { seen[i] = &hermex::gauss_hermite(73); });
  }
  for (auto& th : pool) th.join();
  for (int i = 1; i < 8; ++i) {
    EXPECT_EQ(seen[i], seen[0]);  // one stored rule, stable address
  }
  EXPECT_EQ(seen[0]->nodes.size(), 73u);
}
