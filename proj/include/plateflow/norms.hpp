/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Discrete surrogates of the L_p, Sobolev, trace and time-weighted norms, and
// the admissibility checker for (n, p, mu, omega, a).
//
// Fractional Sobolev norms use the spectral Bessel-potential multiplier
// (1 + lambda_k)^{s/2} followed by a nodal L_p norm.  At p = 2 that is the
// spectrally defined H^s norm; for p != 2 it is a monotone surrogate of the
// interpolation norm, which is all the log-slope decay fits need.

#include <string>
#include <vector>

#include "plateflow/operator.hpp"
#include "plateflow/spectral.hpp"
#include "plateflow/trajectory.hpp"

namespace plateflow {

struct HypothesisParams {
  int n = 1;
  double p = 2.0;
  double mu = 1.0;
  double omega = 0.0;
  double a = 1.0;
};

enum class NormKind {
  lp,         // L_p(Omega)
  sobolev,    // W_p^s(Omega), s from NormSpec::s
  trace_pmu,  // X_{p,mu}:  s = 2 (mu - 1/p)
  trace_p,    // X_p:       s = 2 (1 - 1/p)
};

struct NormSpec {
  NormKind kind = NormKind::trace_pmu;
  double s = 0.0;        // only read for NormKind::sobolev
  bool shifted = false;  // multiply by exp(omega t)
};

/// ((pi/N)^n sum_j |f_j|^p)^{1/p}; p = infinity gives the nodal max.
/// Spectral input is transformed to nodal values first.
double lp_norm(const ScalarField& f, double p);

/// lp_norm of the field with coefficients (1 + lambda_k)^{s/2} c_k.
double sobolev_norm(const ScalarField& f, double s, double p);

/// Smoothness index of the trace space; throws Error(inadmissible_params)
/// unless p > 1 and mu in (1/p, 1].
double trace_smoothness(double p, double mu);

/// l_p combination of the three component norms.
double state_norm(const SpectralState& x, const NormSpec& kind,
                  const HypothesisParams& params);

/// (int e^{omega p t} t^{(1-mu) p} |x(t)|^p dt)^{1/p} by the trapezoid rule.
/// For mu < 1 the sample at t = 0 carries zero weight.
double weighted_time_norm(const std::vector<double>& t,
                          const std::vector<double>& norms, double mu, double p,
                          double omega);
double weighted_time_norm(const Trajectory& traj, double mu, double p,
                          double omega, const NormSpec& space,
                          const HypothesisParams& params);

struct Predicate {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct HypothesisReport {
  HypothesisParams params;
  std::vector<Predicate> predicates;
  bool small_data = false;   // p > 1 + n/2 and mu in ((n+2)/(2p), 1]
  bool large_data = false;   // p > (n+4)/2 and mu in ((n+4)/(4p) + 1/2, 1]
  bool omega_admissible = false;
  double spectral_bound = 0.0;
  double omega_max = 0.0;
  bool trace_boundary_case = false;  // mu p == 3/2
  std::string trace_space;

  /// First failing small-data predicate, or empty.
  std::string small_data_failure() const;
  std::string to_text() const;
};

/// Pure and total: never throws, strict inequalities are strict.
HypothesisReport check_hypotheses(const HypothesisParams& params,
                                  const CouplingMatrix& coupling = {});

}  // namespace plateflow
