/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// The generator A = Delta M.  On the sine basis it splits into independent
// 3x3 blocks B_k = -lambda_k M, one per mode, so the semigroup and the
// phi-functions of exponential integrators are evaluated block by block.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "plateflow/spectral.hpp"

namespace plateflow {

/// Row-major 3x3 matrix.
using Mat3 = std::array<double, 9>;
using Vec3 = std::array<double, 3>;
using Eigenvalues = std::array<std::complex<double>, 3>;

Mat3 identity3();
Mat3 operator*(const Mat3& a, const Mat3& b);
Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(double s, const Mat3& a);
Vec3 operator*(const Mat3& a, const Vec3& v);
/// Induced 1-norm (max column sum).
double norm1(const Mat3& a);

/// Roots of det(M - zI) from the closed-form cubic, polished by Newton
/// steps on the characteristic polynomial.  Sorted by real part ascending,
/// ties by imaginary part ascending.
Eigenvalues characteristic_roots(const Mat3& m);

/// ||(M - zI) v|| / ||v|| for an eigenvector v extracted from the null space
/// of M - zI.
double eigenpair_residual(const Mat3& m, std::complex<double> z);

/// characteristic_roots plus validation: throws Error(non_hurwitz) if some
/// eigenvalue has Re <= 64 eps max(1, |M|_1) (round-off level).
Eigenvalues eig_M(const Mat3& m);

/// The coupling matrix M; every instance has all eigenvalues in Re z > 0.
class CouplingMatrix {
public:
  /// The plate default  [0 1 0; -1 0 1; 0 -1 1].
  CouplingMatrix();
  explicit CouplingMatrix(const Mat3& m);

  const Mat3& matrix() const noexcept { return m_; }
  const Eigenvalues& eigenvalues() const noexcept { return eig_; }
  /// min_j Re mu_j > 0.
  double min_real_part() const noexcept { return eig_[0].real(); }
  double operator()(int row, int col) const { return m_[row * 3 + col]; }

private:
  Mat3 m_;
  Eigenvalues eig_;
};

struct SpectrumReport {
  Eigenvalues eigenvalues;
  int lambda_min = 1;
  /// s(A) = -lambda_min * min Re sigma(M) < 0.
  double spectral_bound = 0.0;
  /// Admissible decay window is [0, omega_max), omega_max = -s(A).
  double omega_max = 0.0;
};

SpectrumReport spectral_bound(const CouplingMatrix& m, const Grid& grid);

struct PhiTriple {
  Mat3 exp;
  Mat3 phi1;
  Mat3 phi2;
};

/// exp(hB), phi1(hB) = X^-1 (e^X - I), phi2(hB) = X^-2 (e^X - I - X).
/// Taylor series (25 terms) once ||X||_1 < 0.1, scaling and squaring above.
PhiTriple phi_functions(const Mat3& b, double h);

Mat3 matrix_exponential(const Mat3& x);

struct ModeBlock {
  int lambda = 0;
  Mat3 generator{};  // -lambda * M
  PhiTriple cache{};  // evaluated at the active step size
};

/// Per-mode blocks of A with cached exp/phi1/phi2 for one step size.
/// Immutable once built; use `with_step` to rebuild for a new h.
class PlateOperator {
public:
  PlateOperator(Grid grid, CouplingMatrix coupling, double h);

  const Grid& grid() const noexcept { return grid_; }
  const CouplingMatrix& coupling() const noexcept { return coupling_; }
  double step() const noexcept { return h_; }
  const ModeBlock& block(std::size_t mode) const {
    return blocks_[block_of_[mode]];
  }
  PlateOperator with_step(double h) const;

  /// exp(hA) x
  SpectralState apply_exp(const SpectralState& x) const;
  /// exp(hA) x + h phi1(hA) n   (the exponential Euler update)
  SpectralState exp_euler_update(const SpectralState& x,
                                 const SpectralState& n) const;
  /// y += h phi2(hA) d
  void add_phi2(SpectralState& y, const SpectralState& d) const;

private:
  Grid grid_;
  CouplingMatrix coupling_;
  double h_;
  std::vector<ModeBlock> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Exact linear evolution exp(tA) x; the result carries time x.t + t.
SpectralState semigroup_apply(const SpectralState& x,
                              const CouplingMatrix& coupling, double t);

}  // namespace plateflow
