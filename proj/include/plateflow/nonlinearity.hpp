/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>

#include "plateflow/operator.hpp"
#include "plateflow/spectral.hpp"

namespace plateflow {

enum class PhiKind { zero, cubic, odd_power, smoothed_cubic };

/// Closed-form nonlinearity phi with phi', phi'' and the antiderivative
/// Phi (Phi(0) = 0) used by the energy.
class PhiModel {
public:
  static PhiModel zero() { return PhiModel(PhiKind::zero, 0); }
  static PhiModel cubic() { return PhiModel(PhiKind::cubic, 3); }
  /// s^m.  Any m >= 1 constructs; only odd m >= 3 passes validate_phi.
  static PhiModel odd_power(int m);
  /// s^3 / (1 + s^2)
  static PhiModel smoothed_cubic() { return PhiModel(PhiKind::smoothed_cubic, 3); }

  PhiKind kind() const noexcept { return kind_; }
  int exponent() const noexcept { return m_; }
  std::string name() const;

  double value(double s) const noexcept;
  double derivative(double s) const noexcept;
  double second_derivative(double s) const noexcept;
  double antiderivative(double s) const noexcept;

private:
  PhiModel(PhiKind kind, int m) : kind_(kind), m_(m) {}

  PhiKind kind_;
  int m_;
};

struct PhiReport {
  double phi_at_zero = 0.0;
  double dphi_at_zero = 0.0;
  double ddphi_at_zero = 0.0;
  bool vanishes_at_zero = false;      // |phi(0)|, |phi'(0)|, |phi''(0)| <= 1e-14
  double max_derivative_error = 0.0;  // worst central-difference mismatch
  bool derivatives_consistent = false;
  bool monotone = false;              // phi' >= 0 sampled on [-10, 10]

  bool admissible() const noexcept {
    return vanishes_at_zero && derivatives_consistent;
  }
};

/// Never throws; used by reporting paths.
PhiReport inspect_phi(const PhiModel& phi);
/// Throws Error(inadmissible_phi) when a vanishing or consistency check fails.
PhiReport validate_phi(const PhiModel& phi);

/// Everything the right-hand side needs besides the state.
struct PlateSystem {
  PlateSystem(Grid grid, CouplingMatrix coupling, PhiModel phi, double a);

  Grid grid;
  CouplingMatrix coupling;
  PhiModel phi;
  double a;
  bool dealias = true;
  double overflow_guard = 1e12;
};

/// A F(x) with F(x) = a [phi(Z), 0, 0]^T, i.e. a * Delta(phi(Z)) times the
/// first column of M.  For the plate default this is (0, -a Delta phi(Z), 0).
SpectralState eval_semilinear(const SpectralState& x, const PlateSystem& sys);

struct QuasilinearParts {
  SpectralState principal;  // B(V) x:   a M e_1 * phi'(V) Delta Z
  SpectralState lower;      // f(V, x):  a M e_1 * phi''(V) grad V . grad Z
};

/// The quasilinear split of Delta phi: with V = Z the two parts sum to
/// eval_semilinear.  `v` may be spectral or physical.
QuasilinearParts eval_quasilinear(const SpectralState& x, const ScalarField& v,
                                  const PlateSystem& sys);

/// a * integral of Phi(Z) by nodal quadrature (dealiased Z when enabled).
double potential_energy(const SpectralState& x, const PlateSystem& sys);

}  // namespace plateflow
