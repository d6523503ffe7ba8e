/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plateflow/errors.hpp"
#include "plateflow/operator.hpp"

using namespace plateflow;

namespace {

const Mat3 kDefault = {0, 1, 0, -1, 0, 1, 0, -1, 1};

double max_diff(const Mat3& a, const Mat3& b) {
  double d = 0;
  for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double max_abs(const Mat3& a) {
  double d = 0;
  for (double v : a) d = std::max(d, std::abs(v));
  return d;
}

Mat3 random_matrix(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 m;
  for (double& v : m) v = u(rng);
  const double n = norm1(m);
  for (double& v : m) v *= scale / n;
  return m;
}

std::vector<std::complex<double>> eigen_values(const Mat3& m) {
  Eigen::Matrix3d e;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) e(r, c) = m[r * 3 + c];
  Eigen::EigenSolver<Eigen::Matrix3d> es(e, false);
  std::vector<std::complex<double>> v(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

}  // namespace

TEST(EigM, DefaultMatchesBisectionOracle) {
  const auto ev = eig_M(kDefault);
  const auto ref = oracle::matrix_eigenvalues(kDefault);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(std::abs(ev[i] - ref[i]), 1e-12);
    EXPECT_GT(ev[i].real(), 0.0);
    EXPECT_LE(eigenpair_residual(kDefault, ev[i]), 1e-10);
  }
  EXPECT_NEAR(ev[0].real(), 0.21508, 1e-5);
  EXPECT_NEAR(ev[0].imag(), -1.30714, 1e-5);
  EXPECT_NEAR(ev[1].imag(), 1.30714, 1e-5);
  EXPECT_NEAR(ev[2].real(), 0.56984, 1e-5);
  EXPECT_EQ(ev[2].imag(), 0.0);
}

TEST(EigM, TrivialMatrices) {
  const auto id = eig_M(identity3());
  for (auto z : id) EXPECT_LT(std::abs(z - 1.0), 1e-12);
  const auto d = eig_M({1, 0, 0, 0, 2, 0, 0, 0, 3});
  EXPECT_LT(std::abs(d[0] - 1.0), 1e-12);
  EXPECT_LT(std::abs(d[1] - 2.0), 1e-12);
  EXPECT_LT(std::abs(d[2] - 3.0), 1e-12);
}

TEST(EigM, NonHurwitzIsRejected) {
  for (const Mat3& m : {Mat3{-1, 0, 0, 0, 1, 0, 0, 0, 1}, Mat3{0, 1, 0, -1, 0, 0, 0, 0, 1},
                        Mat3{0, 0, 0, 0, 1, 0, 0, 0, 1}}) {
    try {
      eig_M(m);
      FAIL() << "expected non_hurwitz";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::non_hurwitz);
    }
    EXPECT_THROW(CouplingMatrix{m}, Error);
  }
}

TEST(EigM, RandomMatricesAgreeWithEigenAndOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 m = random_matrix(rng, 4.0);
    const auto ev = characteristic_roots(m);
    const auto ref = eigen_values(m);
    const auto bis = oracle::matrix_eigenvalues(m);
    for (int i = 0; i < 3; ++i) {
      EXPECT_LT(std::abs(ev[i] - ref[i]), 1e-9) << "trial " << trial;
      EXPECT_LT(std::abs(ev[i] - bis[i]), 1e-9) << "trial " << trial;
    }
  }
}

TEST(SpectralBound, Examples) {
  CouplingMatrix def;
  auto r1 = spectral_bound(def, Grid(1, 16));
  EXPECT_NEAR(r1.spectral_bound, -0.21508, 1e-5);
  EXPECT_NEAR(r1.omega_max, 0.21508, 1e-5);
  EXPECT_EQ(r1.lambda_min, 1);
  auto r2 = spectral_bound(def, Grid(2, 16));
  EXPECT_NEAR(r2.spectral_bound, -0.43016, 1e-5);
  EXPECT_NEAR(r2.spectral_bound, 2 * r1.spectral_bound, 1e-15);
  auto ri = spectral_bound(CouplingMatrix(identity3()), Grid(1, 16));
  EXPECT_NEAR(ri.spectral_bound, -1.0, 1e-12);
}

TEST(ModeBlock, EigenvalueScaling) {
  CouplingMatrix def;
  const auto mu = oracle::matrix_eigenvalues(kDefault);
  for (int n : {1, 2}) {
    Grid g(n, 12);
    PlateOperator op(g, def, 1e-3);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const ModeBlock& b = op.block(i);
      EXPECT_EQ(b.lambda, g.eigenvalue(i));
      auto ev = eigen_values(b.generator);
      // -lambda mu reverses the real-part order
      for (int j = 0; j < 3; ++j) {
        const auto expect = -static_cast<double>(b.lambda) * mu[2 - j];
        const auto got = std::find_if(ev.begin(), ev.end(), [&](auto z) {
          return std::abs(z - expect) <= 1e-10 * std::abs(expect);
        });
        EXPECT_NE(got, ev.end()) << "mode " << i << " eigenvalue " << expect;
      }
    }
  }
}

TEST(PhiFunctions, ZeroMatrix) {
  Mat3 zero{};
  const auto p = phi_functions(zero, 0.5);
  EXPECT_EQ(max_diff(p.exp, identity3()), 0.0);
  EXPECT_EQ(max_diff(p.phi1, identity3()), 0.0);
  EXPECT_EQ(max_diff(p.phi2, 0.5 * identity3()), 0.0);
  EXPECT_EQ(max_diff(matrix_exponential(zero), identity3()), 0.0);
}

TEST(PhiFunctions, ScalarMinusOne) {
  const auto p = phi_functions(-1.0 * identity3(), 1.0);
  const auto ref = oracle::taylor_phi(-1.0 * identity3());
  const double e = std::exp(-1.0);
  EXPECT_NEAR(p.exp[0], e, 1e-15);
  EXPECT_NEAR(p.phi1[0], 1 - e, 1e-15);
  EXPECT_NEAR(p.phi2[0], e, 1e-15);  // (e^-1 - 1 + 1) / 1
  EXPECT_NEAR(ref.phi2[0], e, 1e-16);
  EXPECT_LT(max_diff(p.phi1, ref.phi1), 1e-15);
  EXPECT_LT(max_diff(p.phi2, ref.phi2), 1e-15);
}

TEST(PhiFunctions, RandomMatchExtendedPrecisionTaylor) {
  std::mt19937_64 rng(12);
  for (double scale : {0.01, 0.09, 0.11, 0.5, 2.0, 6.0, 10.0}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Mat3 x = random_matrix(rng, scale);
      const auto p = phi_functions(x, 1.0);
      const auto ref = oracle::taylor_phi(x);
      EXPECT_LE(max_diff(p.exp, ref.exp), 1e-12 * max_abs(ref.exp)) << "scale " << scale;
      EXPECT_LE(max_diff(p.phi1, ref.phi1), 1e-12 * max_abs(ref.phi1)) << "scale " << scale;
      EXPECT_LE(max_diff(p.phi2, ref.phi2), 1e-12 * max_abs(ref.phi2)) << "scale " << scale;
    }
  }
}

TEST(PhiFunctions, StepSizeScalesArgument) {
  std::mt19937_64 rng(13);
  const Mat3 b = random_matrix(rng, 3.0);
  const auto p = phi_functions(b, 0.25);
  const auto q = phi_functions(0.25 * b, 1.0);
  EXPECT_LT(max_diff(p.phi1, q.phi1), 1e-14);
}

TEST(PhiFunctions, DefiningIdentities) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const double scale = 10.0 * (trial + 1) / 300.0;
    const Mat3 x = random_matrix(rng, scale);
    const auto p = phi_functions(x, 1.0);
    const Mat3 i3 = identity3();
    const Mat3 r1 = (p.exp - i3) - x * p.phi1;
    const Mat3 r2 = (p.exp - i3 - x) - (x * x) * p.phi2;
    const double s = std::max(1.0, max_abs(p.exp));
    EXPECT_LE(max_abs(r1), 1e-11 * s) << "scale " << scale;
    EXPECT_LE(max_abs(r2), 1e-11 * s) << "scale " << scale;
  }
}

TEST(PhiFunctions, SmallNormSeriesConsistency) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat3 x = random_matrix(rng, 0.05 * (trial + 1) / 100.0);
    const auto p = phi_functions(x, 1.0);
    EXPECT_LE(max_abs(p.exp - (identity3() + x * p.phi1)), 1e-12);
  }
}

TEST(Semigroup, IdentityAtZeroAndSemigroupLaw) {
  Grid g(2, 8);
  CouplingMatrix def;
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1, 1);
  SpectralState x(g);
  for (int c = 0; c < 3; ++c)
    for (auto& v : x.component(c).values()) v = u(rng);
  EXPECT_EQ(coefficient_sup(semigroup_apply(x, def, 0.0) - x), 0.0);
  for (auto [s, t] : {std::pair{0.1, 0.3}, std::pair{0.7, 1.9}, std::pair{2.5, 0.01}}) {
    auto two = semigroup_apply(semigroup_apply(x, def, s), def, t);
    auto one = semigroup_apply(x, def, s + t);
    EXPECT_LE(coefficient_sup(two - one), 1e-10);
    EXPECT_NEAR(one.t, s + t, 1e-15);
  }
}

TEST(Semigroup, SingleModeAgainstRungeKutta) {
  CouplingMatrix def;
  Grid g(1, 8);
  for (int k : {1, 2, 3}) {
    SpectralState x(ScalarField::mode(g, 1.0, k), ScalarField::mode(g, -0.5, k),
                    ScalarField::mode(g, 0.25, k));
    auto y = semigroup_apply(x, def, 1.0);
    const double lam = k * k;
    auto rhs = [&](double, const std::vector<double>& v, std::vector<double>& dv) {
      for (int r = 0; r < 3; ++r) {
        dv[r] = 0;
        for (int c = 0; c < 3; ++c) dv[r] -= lam * kDefault[r * 3 + c] * v[c];
      }
    };
    auto ref = oracle::integrate(rhs, {1.0, -0.5, 0.25}, 0.0, 1.0, 1e-12, 1e-14);
    const std::size_t i = g.index_of(k);
    EXPECT_NEAR(y.z[i], ref[0], 1e-8);
    EXPECT_NEAR(y.u[i], ref[1], 1e-8);
    EXPECT_NEAR(y.theta[i], ref[2], 1e-8);
  }
}

TEST(Semigroup, BlocksDecay) {
  CouplingMatrix def;
  const double smin = def.min_real_part();
  for (int lam : {1, 2, 5, 50}) {
    const Mat3 b = -static_cast<double>(lam) * def.matrix();
    double prev = norm1(identity3());
    for (double t : {1.0, 5.0, 20.0, 60.0}) {
      const double n = norm1(matrix_exponential(t * b));
      EXPECT_LE(n, 10.0 * std::exp(-t * lam * smin)) << "lambda " << lam << " t " << t;
      if (t > 5.0) {
        EXPECT_LT(n, prev);
      }
      prev = n;
    }
  }
}

TEST(PlateOperator, ApplyExpMatchesSemigroup) {
  Grid g(1, 16);
  CouplingMatrix def;
  PlateOperator op(g, def, 0.01);
  SpectralState x(ScalarField::mode(g, 1.0, 1) + ScalarField::mode(g, 0.3, 7),
                  ScalarField::mode(g, 0.2, 2), ScalarField::mode(g, -0.1, 15));
  auto a = op.apply_exp(x);
  auto b = semigroup_apply(x, def, 0.01);
  EXPECT_LE(coefficient_sup(a - b), 1e-15);
  auto op2 = op.with_step(0.02);
  EXPECT_EQ(op2.step(), 0.02);
  EXPECT_LE(coefficient_sup(op2.apply_exp(x) - op.apply_exp(op.apply_exp(x))), 1e-14);
  EXPECT_THROW(PlateOperator(g, def, 0.0), Error);
}
