/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "plateflow/spectral.hpp"

namespace plateflow {

struct Diagnostics {
  double energy = 0.0;       // E = 1/2 (|Z|^2 + |U|^2 + |Theta|^2) + a int Phi(Z)
  double dissipation = 0.0;  // D = |grad Theta|^2
  double l2_z = 0.0;
  double l2_u = 0.0;
  double l2_theta = 0.0;
  double norm_xpmu = 0.0;
  double norm_xp = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  SpectralState state;
  Diagnostics diag;
};

enum class Termination { completed, blowup, diverged };

const char* to_string(Termination t);

/// Per-step residual of the energy balance E(t+h) - E(t) + int D dt, with the
/// dissipation integral taken by the trapezoid rule.  Accumulated over every
/// step, not just the recorded samples.
struct EnergyBalance {
  std::size_t steps = 0;
  double max_step_residual = 0.0;
  double accumulated_residual = 0.0;  // sum of |per-step residual|
  double net_residual = 0.0;          // E(T) - E(0) + int_0^T D dt
};

class Trajectory {
public:
  /// Throws Error(invalid_argument) unless t is strictly increasing.
  void append(TrajectorySample sample);

  const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }
  const TrajectorySample& back() const { return samples_.back(); }

  std::vector<double> times() const;
  std::vector<double> xpmu_series() const;
  std::vector<double> xp_series() const;

  Termination status = Termination::completed;
  double status_time = 0.0;
  std::string message;
  EnergyBalance balance;

private:
  std::vector<TrajectorySample> samples_;
};

/// Columns t,E,D,l2_Z,l2_U,l2_Theta,norm_Xpmu,norm_Xp,status.  Interior rows
/// carry status "ok"; the last row carries the termination status.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Little-endian binary: header {n, N, count} as uint64, then per sample
/// t as float64 followed by the Z, U, Theta coefficient arrays as float64.
void write_snapshots(const Trajectory& traj, std::ostream& out);
/// Inverse of write_snapshots; diagnostics of the returned samples are zero.
Trajectory read_snapshots(std::istream& in);

}  // namespace plateflow
