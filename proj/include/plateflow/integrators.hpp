/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Time propagation of x_t = A x + N(x), N(x) = A F(x).
//
// Exponential schemes use the per-mode blocks of PlateOperator, so the linear
// part is integrated exactly.  The fixed-point solver reproduces the
// existence argument operationally: an outer Picard map W -> T(W), where T(W)
// solves the linear problem with coefficients frozen at V = Z(W), itself
// solved by a Neumann series around the exact semigroup.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "plateflow/nonlinearity.hpp"
#include "plateflow/norms.hpp"
#include "plateflow/operator.hpp"
#include "plateflow/trajectory.hpp"

namespace plateflow {

enum class Method { exp_euler, etdrk2, imex_cn };

const char* to_string(Method m);
/// Throws Error(invalid_argument) on unknown names.
Method method_from_string(const std::string& name);

struct StepperConfig {
  Method method = Method::etdrk2;
  double h = 1e-3;
  double T = 1.0;
  bool dealias = true;
  double overflow_guard = 1e12;
  std::size_t sample_every = 1;
};

/// Number of steps T/h; throws unless h > 0, T > 0, T/h is (within 1e-9)
/// an integer in [1, 1e7].
std::size_t step_count(double h, double T);

using NonlinearTerm = std::function<SpectralState(const SpectralState&)>;

/// x+ = e^{hA} x + h phi1(hA) N(x)
SpectralState step_exp_euler(const PlateOperator& op, const SpectralState& x,
                             const NonlinearTerm& n);
/// a = e^{hA} x + h phi1(hA) N(x);  x+ = a + h phi2(hA) (N(a) - N(x))
SpectralState step_etdrk2(const PlateOperator& op, const SpectralState& x,
                          const NonlinearTerm& n);

SpectralState step_exp_euler(const SpectralState& x, double h,
                             const PlateSystem& sys);
SpectralState step_etdrk2(const SpectralState& x, double h,
                          const PlateSystem& sys);

/// Crank-Nicolson on the linear blocks, explicit Euler on N.  Not exact on
/// the linear part, unlike the exponential schemes.
class CrankNicolsonBlocks {
public:
  CrankNicolsonBlocks(const Grid& grid, const CouplingMatrix& coupling,
                      double h);
  SpectralState step(const SpectralState& x, const SpectralState& n) const;

private:
  Grid grid_;
  double h_;
  std::vector<Mat3> propagator_;  // (I - h/2 B)^{-1} (I + h/2 B)
  std::vector<Mat3> resolvent_;   // (I - h/2 B)^{-1}
};

Diagnostics diagnose(const SpectralState& x, const PlateSystem& sys,
                     const HypothesisParams& params);

/// Runs the configured stepper from x0 over [x0.t, x0.t + T].  A BlowUp (or
/// any non-finite value) ends the run with status blowup; the trajectory
/// never contains non-finite entries.
Trajectory simulate(const PlateSystem& sys, const SpectralState& x0,
                    const StepperConfig& cfg, const HypothesisParams& params);

// ---------------------------------------------------------------------------
// Fixed-point solver

struct PicardConfig {
  double outer_tol = 1e-10;
  int max_outer = 50;
  double inner_tol = 1e-12;
  int max_inner = 100;
  double h = 1e-3;
  double T = 1.0;
  std::size_t sample_every = 1;
};

/// Uniformly sampled state path t_n = t0 + n h, n = 0..steps, stored flat.
class StatePath {
public:
  StatePath(Grid grid, double t0, double h, std::size_t steps);
  static StatePath constant(const SpectralState& x0, double h,
                            std::size_t steps);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t steps() const noexcept { return steps_; }
  double time(std::size_t n) const noexcept {
    return t0_ + static_cast<double>(n) * h_;
  }
  double step() const noexcept { return h_; }

  SpectralState state(std::size_t n) const;
  ScalarField z(std::size_t n) const;
  void set(std::size_t n, const SpectralState& x);

private:
  Grid grid_;
  double t0_;
  double h_;
  std::size_t steps_;
  std::vector<double> data_;
};

/// Coefficient path V(t_n) for the frozen problem (spectral or physical).
using CoefficientPath = std::function<ScalarField(std::size_t step)>;

struct FrozenSolution {
  StatePath x;
  std::vector<double> increments;  // sup_n |w_{j+1} - w_j|, j = 0, 1, ...
  std::vector<double> factors;     // increments[j] / increments[j-1]
  int iterations = 0;
};

/// Solves x_t = (A + B(V)) x + f(V, x), x(t0) = x0 on the grid h, T by
/// x = v + w: v = e^{tA} x0 exactly, and w from the Neumann iteration
/// w_{j+1} = (d_t - A)^{-1}[B(V) w_j + f(V, w_j) + g], w_0 = 0, with the
/// inverse realized by exponential Euler from zero data.  Increments are
/// measured in the sup-in-time X_{p,mu} norm.  Throws Diverged(neumann_diverged)
/// after 3 consecutive factors >= 1, on non-convergence within max_inner, or
/// when an iterate trips the overflow guard.
FrozenSolution solve_frozen_coefficient(const PlateSystem& sys,
                                        const CoefficientPath& v,
                                        const SpectralState& x0,
                                        const PicardConfig& cfg,
                                        const HypothesisParams& params);

struct PicardResult {
  Trajectory trajectory;
  std::vector<double> outer_increments;
  std::vector<double> outer_factors;
  std::vector<std::vector<double>> inner_factors;  // per outer iteration
  int iterations = 0;
};

/// Outer iteration W_{m+1} = T(W_m), W_0 = x0 constant in time, until the
/// sup-in-time X_{p,mu} increment drops below outer_tol.  Throws
/// Diverged(outer_diverged) after 3 consecutive factors >= 1 or max_outer
/// iterations; Neumann failures propagate.
PicardResult picard_solve(const PlateSystem& sys, const SpectralState& x0,
                          const PicardConfig& cfg,
                          const HypothesisParams& params);

/// Samples a path into a Trajectory with diagnostics and energy balance.
Trajectory to_trajectory(const StatePath& path, const PlateSystem& sys,
                         const HypothesisParams& params,
                         std::size_t sample_every);

}  // namespace plateflow
