/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Reference computations used only by the tests.  None of them call into the
// library: transforms are evaluated by direct summation with sinl, roots by
// bisection, matrix functions by long Taylor series in quad precision and
// ODEs by an adaptive Dormand-Prince pair.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using Mat3 = std::array<double, 9>;

// ---- sine transforms on (0, pi)^n, coefficient convention c_1 = 1 for sin x
std::vector<double> naive_dst_inverse(const std::vector<double>& c, int n, int N);
std::vector<double> naive_dst_forward(const std::vector<double>& f, int n, int N);

// ---- cubic z^3 + c2 z^2 + c1 z + c0: one real root by bisection, the
// other two from the deflated quadratic.  Sorted by real part, then imag.
std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0);
/// Roots of det(M - zI) via cubic_roots.
std::array<std::complex<double>, 3> matrix_eigenvalues(const Mat3& m);

// ---- phi_k(X) = sum_j X^j / (j + k)!, 200 terms in __float128
struct PhiSeries {
  Mat3 exp;
  Mat3 phi1;
  Mat3 phi2;
};
PhiSeries taylor_phi(const Mat3& x);

// ---- adaptive Dormand-Prince 5(4)
using Rhs = std::function<void(double t, const std::vector<double>& y,
                               std::vector<double>& dydt)>;
struct OdeStats {
  int accepted = 0;
  int rejected = 0;
};
std::vector<double> integrate(const Rhs& f, std::vector<double> y, double t0,
                              double t1, double rtol, double atol,
                              OdeStats* stats = nullptr);

/// Right-hand side of the 1-D plate system x_t = A x + a M e_1 Delta phi(Z)
/// on the coefficient vector [Z_1..Z_{N-1}, U_1.., Theta_1..], with the 2/3
/// rule applied to Z and to phi(Z) when `dealias` is set.  `phi` maps s to
/// phi(s); pass nullptr for the linear system.
Rhs plate_rhs_1d(const Mat3& m, int N, double a, double (*phi)(double),
                 bool dealias);

// ---- finite differences
double central_diff(const std::function<double(double)>& f, double x, double h);
double second_diff(const std::function<double(double)>& f, double x, double h);

}  // namespace oracle
