/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "plateflow/errors.hpp"
#include "plateflow/spectral.hpp"

using namespace plateflow;

namespace {

ScalarField random_field(const Grid& g, Representation rep, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = u(rng);
  return ScalarField(g, rep, std::move(v));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> to_vec(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

}  // namespace

TEST(Grid, ModeCountAndEigenvalues) {
  for (int n : {1, 2}) {
    Grid g(n, 16);
    EXPECT_EQ(g.size(), n == 1 ? 15u : 225u);
    int lmin = 1 << 30;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto k = g.mode_of(i);
      EXPECT_EQ(g.eigenvalue(i), k[0] * k[0] + k[1] * k[1]);
      EXPECT_EQ(g.index_of(k[0], k[1]), i);
      lmin = std::min(lmin, g.eigenvalue(i));
    }
    EXPECT_EQ(lmin, n);
    EXPECT_EQ(g.lambda_min(), n);
  }
}

TEST(Grid, RejectsInvalidShapes) {
  EXPECT_THROW(Grid(3, 16), Error);
  EXPECT_THROW(Grid(0, 16), Error);
  EXPECT_THROW(Grid(1, 3), Error);
}

TEST(Grid, NodesAreInterior) {
  Grid g(1, 8);
  EXPECT_DOUBLE_EQ(g.node(1), std::numbers::pi / 8);
  EXPECT_DOUBLE_EQ(g.node(7), 7 * std::numbers::pi / 8);
}

TEST(DstForward, SineIsUnitCoefficient) {
  Grid g(1, 8);
  auto f = ScalarField::sample(g, [](double x, double) { return std::sin(x); });
  auto c = dst_forward(f);
  EXPECT_TRUE(c.is_spectral());
  EXPECT_NEAR(c[0], 1.0, 1e-15);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_NEAR(c[i], 0.0, 1e-15);
}

TEST(DstForward, ZeroField) {
  Grid g(2, 8);
  auto c = dst_forward(ScalarField(g, Representation::physical));
  for (double v : c.values()) EXPECT_EQ(v, 0.0);
}

TEST(DstForward, ProductOfSinesMatchesNaiveSum) {
  for (int N : {8, 16, 64}) {
    Grid g(1, N);
    auto f = ScalarField::sample(
        g, [](double x, double) { return std::sin(x) * std::sin(3 * x); });
    auto c = dst_forward(f);
    auto ref = oracle::naive_dst_forward(to_vec(f), 1, N);
    EXPECT_LT(max_abs_diff(c.values(), ref), 1e-14) << "N=" << N;
  }
}

TEST(DstForward, TwoDimensionalMatchesNaiveSum) {
  Grid g(2, 12);
  std::mt19937_64 rng(1);
  auto f = random_field(g, Representation::physical, rng);
  auto ref = oracle::naive_dst_forward(to_vec(f), 2, 12);
  EXPECT_LT(max_abs_diff(dst_forward(f).values(), ref), 1e-14);
  auto c = random_field(g, Representation::spectral, rng);
  auto ref_inv = oracle::naive_dst_inverse(to_vec(c), 2, 12);
  EXPECT_LT(max_abs_diff(dst_inverse(c).values(), ref_inv), 1e-13);
}

TEST(DstForward, WrongTagThrows) {
  Grid g(1, 8);
  try {
    dst_forward(ScalarField(g, Representation::spectral));
    FAIL() << "expected a tag mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::tag_mismatch);
  }
  EXPECT_THROW(dst_inverse(ScalarField(g, Representation::physical)), Error);
  EXPECT_THROW(laplacian_apply(ScalarField(g, Representation::physical)), Error);
  EXPECT_THROW(gradient_squared(ScalarField(g, Representation::physical)), Error);
}

TEST(DstInverse, UnitCoefficientGivesNodalSine) {
  Grid g(1, 16);
  auto f = dst_inverse(ScalarField::mode(g, 1.0, 2));
  EXPECT_FALSE(f.is_spectral());
  for (int j = 1; j < 16; ++j) EXPECT_NEAR(f[j - 1], std::sin(2 * g.node(j)), 1e-15);
}

TEST(DstInverse, RoundTripAndLinearity) {
  std::mt19937_64 rng(2);
  for (int n : {1, 2}) {
    Grid g(n, 32);
    for (int trial = 0; trial < 20; ++trial) {
      auto f = random_field(g, Representation::physical, rng);
      auto back = dst_inverse(dst_forward(f));
      EXPECT_LE(max_abs_diff(back.values(), f.values()), 1e-12 * f.max_abs());

      auto c1 = random_field(g, Representation::spectral, rng);
      auto c2 = random_field(g, Representation::spectral, rng);
      const double a = 0.7, b = -2.3;
      auto lhs = dst_inverse(a * c1 + b * c2);
      auto rhs = a * dst_inverse(c1) + b * dst_inverse(c2);
      EXPECT_LE(max_abs_diff(lhs.values(), rhs.values()), 1e-12 * rhs.max_abs());
    }
  }
}

TEST(Parseval, DiscreteIdentity) {
  std::mt19937_64 rng(3);
  for (int n : {1, 2}) {
    Grid g(n, 32);
    auto c = random_field(g, Representation::spectral, rng);
    auto f = dst_inverse(c);
    double nodal = 0, coef = 0;
    for (double v : f.values()) nodal += v * v;
    for (double v : c.values()) coef += v * v;
    nodal *= g.cell_volume();
    coef *= g.parseval_factor();
    EXPECT_NEAR(nodal / coef, 1.0, 1e-10);
  }
}

TEST(Laplacian, EigenfunctionExamples) {
  Grid g1(1, 16);
  auto l = laplacian_apply(ScalarField::mode(g1, 1.0, 2));
  EXPECT_EQ(l[g1.index_of(2)], -4.0);

  Grid g2(2, 8);
  auto l2 = laplacian_apply(ScalarField::mode(g2, 1.0, 1, 2));
  EXPECT_EQ(l2[g2.index_of(1, 2)], -5.0);

  auto sum = ScalarField::mode(g1, 1.0, 1) + ScalarField::mode(g1, 1.0, 3);
  auto ls = laplacian_apply(sum);
  EXPECT_EQ(ls[g1.index_of(1)], -1.0);
  EXPECT_EQ(ls[g1.index_of(3)], -9.0);
  for (std::size_t i = 0; i < ls.size(); ++i)
    if (i != g1.index_of(1) && i != g1.index_of(3)) {
      EXPECT_EQ(ls[i], 0.0);
    }
}

TEST(Laplacian, EigenIdentityIsExact) {
  Grid g(2, 16);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.mode_of(i);
    auto l = laplacian_apply(ScalarField::mode(g, 0.37, k[0], k[1]));
    EXPECT_EQ(l[i], -0.37 * g.eigenvalue(i));
  }
}

TEST(Laplacian, SolveExamples) {
  Grid g1(1, 16);
  auto w = laplacian_solve(ScalarField::mode(g1, -4.0, 2));
  EXPECT_NEAR(w[g1.index_of(2)], 1.0, 1e-15);

  Grid g2(2, 8);
  auto w2 = laplacian_solve(ScalarField::mode(g2, 1.0, 1, 1));
  EXPECT_NEAR(w2[g2.index_of(1, 1)], -0.5, 1e-15);

  std::mt19937_64 rng(4);
  for (int n : {1, 2}) {
    Grid g(n, 32);
    auto f = random_field(g, Representation::spectral, rng);
    auto back = laplacian_solve(laplacian_apply(f));
    EXPECT_LE(max_abs_diff(back.values(), f.values()), 1e-12 * f.max_abs());
  }
}

TEST(GradientSquared, Examples) {
  Grid g(1, 32);
  auto gs = gradient_squared(ScalarField::mode(g, 1.0, 1));
  EXPECT_FALSE(gs.is_spectral());
  for (int j = 1; j < 32; ++j) {
    const double c = std::cos(g.node(j));
    EXPECT_NEAR(gs[j - 1], c * c, 1e-13);
  }
  auto zero = gradient_squared(ScalarField(g, Representation::spectral));
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

TEST(GradientSquared, TwoModesAgainstFiniteDifferences) {
  auto f = [](double x) { return std::sin(x) + std::sin(2 * x); };
  for (int N : {16, 32, 64}) {
    Grid g(1, N);
    auto gs = gradient_squared(ScalarField::mode(g, 1.0, 1) + ScalarField::mode(g, 1.0, 2));
    const double delta = std::numbers::pi / (4.0 * N);
    double err_fd = 0;
    for (int j = 1; j < N; ++j) {
      const double x = g.node(j);
      const double exact = std::pow(std::cos(x) + 2 * std::cos(2 * x), 2);
      EXPECT_NEAR(gs[j - 1], exact, 1e-12);
      const double fd = oracle::central_diff(f, x, delta);
      err_fd = std::max(err_fd, std::abs(gs[j - 1] - fd * fd));
    }
    // second-order agreement with the refined finite-difference oracle
    EXPECT_LT(err_fd, 10.0 * delta * delta) << "N=" << N;
  }
}

TEST(GradientSquared, TwoDimensionalProduct) {
  Grid g(2, 16);
  auto gs = gradient_squared(ScalarField::mode(g, 1.0, 1, 2));
  for (int j1 = 1; j1 < 16; ++j1)
    for (int j2 = 1; j2 < 16; ++j2) {
      const double x = g.node(j1), y = g.node(j2);
      const double gx = std::cos(x) * std::sin(2 * y);
      const double gy = 2 * std::sin(x) * std::cos(2 * y);
      EXPECT_NEAR(gs[(j1 - 1) * 15 + (j2 - 1)], gx * gx + gy * gy, 1e-12);
    }
}

TEST(GradientSquared, NonNegative) {
  std::mt19937_64 rng(5);
  for (int n : {1, 2}) {
    Grid g(n, 16);
    for (int trial = 0; trial < 10; ++trial) {
      auto gs = gradient_squared(random_field(g, Representation::spectral, rng));
      for (double v : gs.values()) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Dealias, ZeroesTopThird) {
  Grid g(2, 12);
  std::mt19937_64 rng(6);
  auto d = dealias(random_field(g, Representation::spectral, rng));
  const int cut = g.dealias_cutoff();
  EXPECT_EQ(cut, 8);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = g.mode_of(i);
    if (k[0] > cut || k[1] > cut) {
      EXPECT_EQ(d[i], 0.0);
    }
    else EXPECT_NE(d[i], 0.0);
  }
}

TEST(SpectralState, ArithmeticAndFiniteness) {
  Grid g(1, 8);
  SpectralState x(ScalarField::mode(g, 1.0, 1), ScalarField::mode(g, 2.0, 2),
                  ScalarField::mode(g, 3.0, 3), 0.5);
  auto y = 2.0 * x - x;
  EXPECT_EQ(coefficient_sup(y - x), 0.0);
  EXPECT_EQ(coefficient_sup(x), 3.0);
  EXPECT_TRUE(x.all_finite());
  x.u[0] = std::nan("");
  EXPECT_FALSE(x.all_finite());
  EXPECT_THROW(ScalarField(g, Representation::spectral) += ScalarField(Grid(1, 16), Representation::spectral),
               Error);
}
