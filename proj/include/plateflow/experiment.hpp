/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Experiment orchestration: initial data, decay fits, smallness probes,
// convergence studies and the report/CSV products of a configured run.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "plateflow/config.hpp"
#include "plateflow/integrators.hpp"

namespace plateflow {

// ---------------------------------------------------------------------------
// Decay fits

enum class FitMethod { regression, envelope };

const char* to_string(FitMethod m);
FitMethod fit_method_from_string(const std::string& name);

struct DecayFit {
  FitMethod method = FitMethod::regression;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double omega_fit = 0.0;  // norm ~ exp(intercept - omega_fit t)
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;  // samples (regression) or peaks (envelope)
  double s_A = 0.0;        // filled by compare_to_bound
  double rel_gap = 0.0;    // |omega_fit + s_A| / -s_A
};

/// Least-squares fit of log(y) against t over samples with t in [t_lo, t_hi].
/// The envelope method regresses only over local maxima of the detrended
/// log-norm r = log y - slope * t (r[i] > r[i-1] and r[i] >= r[i+1], so ties
/// go to the earlier sample), re-detrending with the peak fit until the peak
/// set is stable.  Throws
/// Error(window_too_small) with fewer than 10 samples in the window (or fewer
/// than 2 peaks), Error(non_positive_samples) if some y <= 0 in the window.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y,
                   double t_lo, double t_hi, FitMethod method);

void compare_to_bound(DecayFit& fit, double spectral_bound);

/// Columns method,t_lo,t_hi,omega_fit,intercept,r2,s_A,rel_gap.
void write_decay_csv(const std::vector<DecayFit>& fits, std::ostream& out);

/// sup over samples with t >= sigma of |x(t)|_{X_p} e^{omega t} / x0_norm.
double decay_constant(const Trajectory& traj, double sigma, double omega,
                      double x0_norm);

// ---------------------------------------------------------------------------
// Post-processing

/// W(t) = Delta^{-1} Z(t) for every sample.
std::vector<ScalarField> recover_W(const Trajectory& traj);

struct PlateResidual {
  std::vector<double> t;         // interior sample times
  std::vector<double> residual;  // L2 norm of the residual at each t
  double max = 0.0;
};

/// Residual of W_tt + Delta^2 W - Delta Theta + a Delta phi(Delta W) = 0 with
/// W_tt by central differences over the sample spacing (which must be
/// uniform).  For a general coupling matrix the linear part is M's second
/// row applied to (Z, U, Theta).
PlateResidual plate_residual(const Trajectory& traj, const PlateSystem& sys);

// ---------------------------------------------------------------------------
// Initial data

enum class InitialFamily { modes, random };
enum class InitialVariables { x, w };  // x(0) directly, or (f, g, h)

struct ModeTerm {
  int component = 0;  // 0: Z (or f), 1: U (or g), 2: Theta (or h)
  int k1 = 1;
  int k2 = 0;
  double amplitude = 0.0;
};

struct InitialSpec {
  InitialFamily family = InitialFamily::random;
  InitialVariables variables = InitialVariables::x;
  std::vector<ModeTerm> modes;
  std::uint64_t seed = 1;
  /// Random family: coefficients are uniform in [-1, 1], the top half of the
  /// modes (some k_i > N/2) is zeroed, and with ratio > 0 the rest is weighted
  /// by ratio^(|k|_1 - n) (analytic data).
  double ratio = 0.0;
  /// Rescale to this X_{p,mu} norm when > 0.
  double amplitude = 0.0;
};

/// The unscaled initial state.  Random coefficients depend only on the seed,
/// the component and the mode, never on N.
SpectralState initial_state(const InitialSpec& spec, const Grid& grid);
/// Applies spec.amplitude (if set) with the norm measured on the state's grid.
SpectralState scaled_initial_state(const InitialSpec& spec, const Grid& grid,
                                   const HypothesisParams& params);

// ---------------------------------------------------------------------------
// Configured experiments

struct FitSpec {
  bool enabled = false;
  FitMethod method = FitMethod::envelope;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::string norm = "xpmu";  // xpmu | xp
  double tolerance = 0.1;     // declared bound on rel_gap
  std::vector<double> sigmas;  // decay_constant probes
};

enum class ConvergenceAxis { h, N };

struct ConvergenceSpec {
  ConvergenceAxis axis = ConvergenceAxis::h;
  int levels = 4;
  int reference_factor = 16;  // h axis: h_ref = h_min / factor
};

struct ExperimentConfig {
  int n = 1;
  int N = 64;
  HypothesisParams params;
  PhiModel phi = PhiModel::cubic();
  double a = 1.0;
  CouplingMatrix coupling;
  InitialSpec initial;
  StepperConfig stepper;
  PicardConfig picard;
  FitSpec fit;
  ConvergenceSpec convergence;
  std::vector<double> probe_amplitudes;
  std::string out_dir = "plateflow_out";
  bool snapshots = false;
  bool force = false;
  std::vector<std::pair<std::string, std::string>> echo;  // provenance

  Grid grid() const { return Grid(n, N); }
  PlateSystem system() const;
};

/// Throws ConfigError (with line and key where known) on any invalid entry.
ExperimentConfig parse_experiment(const ConfigDocument& doc);
ExperimentConfig load_experiment(const std::string& path);

// ---------------------------------------------------------------------------
// Smallness probe

struct ProbeRow {
  double amplitude = 0.0;
  Termination status = Termination::completed;
  double event_time = 0.0;  // blow-up time, or final time
  bool has_fit = false;     // false when no decay rate is defined
  double omega_fit = 0.0;
  double outer_factor = 0.0;  // largest Picard factor (picard runs only)
  std::string message;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  bool has_bracket = false;
  double decaying_below = 0.0;  // last amplitude that decayed
  double failing_above = 0.0;   // first amplitude that did not
  std::string to_text() const;
};

/// Scales `base` to each X_{p,mu} amplitude (increasing) and records the
/// outcome.  The bracket is discretization dependent.  Never throws solver
/// errors; they become row statuses.
ProbeReport smallness_probe(const PlateSystem& sys, const SpectralState& base,
                            const std::vector<double>& amplitudes,
                            const StepperConfig& stepper,
                            const HypothesisParams& params, const FitSpec& fit,
                            const PicardConfig* picard = nullptr);

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceRow {
  double h = 0.0;
  int N = 0;
  double error = 0.0;
  double order = 0.0;  // log2(e_prev / e); NaN on the first row
  double ratio = 0.0;  // e_prev / e; NaN on the first row
};

struct ConvergenceReport {
  ConvergenceAxis axis = ConvergenceAxis::h;
  Method method = Method::etdrk2;
  double reference_h = 0.0;
  int reference_N = 0;
  std::vector<ConvergenceRow> rows;
};

/// Final-time X_{p,mu} errors against a finer self-reference.  The h axis
/// halves cfg.stepper.h per level; the N axis doubles cfg.N per level and
/// compares on the reference grid with the amplitude scale taken there.
ConvergenceReport convergence_study(const ExperimentConfig& cfg,
                                    ConvergenceAxis axis);

void write_convergence_csv(const ConvergenceReport& r, std::ostream& out);

// ---------------------------------------------------------------------------
// Commands

enum class Command { simulate, picard, spectrum, decay_fit, check, convergence };

Command command_from_string(const std::string& name);

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_hypothesis = 3,
  exit_solver = 4,
};

struct ExperimentOutcome {
  int exit_code = exit_ok;
  std::string report;
  Trajectory trajectory;
  std::vector<DecayFit> fits;
  std::vector<std::string> files;  // written, in order
};

/// Runs one command and writes its products into cfg.out_dir.  Solver
/// failures are recorded in the report and the exit code; configuration and
/// I/O problems throw.  `trajectory_csv`, when non-empty, makes decay_fit read
/// its series from an existing trajectory CSV instead of simulating.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, Command cmd,
                                 const std::string& trajectory_csv = {});

/// Reads (t, column) from a trajectory CSV.
std::pair<std::vector<double>, std::vector<double>> read_trajectory_series(
    std::istream& in, const std::string& column);

}  // namespace plateflow
