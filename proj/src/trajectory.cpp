/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/trajectory.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "plateflow/errors.hpp"

namespace plateflow {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup: return "blowup";
    case Termination::diverged: return "diverged";
  }
  return "?";
}

void Trajectory::append(TrajectorySample sample) {
  if (!samples_.empty() && !(sample.t > samples_.back().t))
    throw Error(ErrorKind::invalid_argument,
                "trajectory time stamps must increase strictly");
  samples_.push_back(std::move(sample));
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.t);
  return out;
}

std::vector<double> Trajectory::xpmu_series() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.diag.norm_xpmu);
  return out;
}

std::vector<double> Trajectory::xp_series() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.diag.norm_xp);
  return out;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,E,D,l2_Z,l2_U,l2_Theta,norm_Xpmu,norm_Xp,status\n";
  char buf[512];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj[i];
    const char* status = i + 1 == traj.size() ? to_string(traj.status) : "ok";
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", s.t,
                  s.diag.energy, s.diag.dissipation, s.diag.l2_z, s.diag.l2_u,
                  s.diag.l2_theta, s.diag.norm_xpmu, s.diag.norm_xp, status);
    out << buf;
  }
}

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw Error(ErrorKind::io, "truncated snapshot file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshots(const Trajectory& traj, std::ostream& out) {
  if (traj.empty()) throw Error(ErrorKind::invalid_argument, "empty trajectory");
  const Grid& g = traj[0].state.grid();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.dim()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.modes()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(traj.size()));
  for (const auto& s : traj.samples()) {
    put<double>(out, s.t);
    for (int c = 0; c < 3; ++c)
      for (double v : s.state.component(c).values()) put<double>(out, v);
  }
  if (!out) throw Error(ErrorKind::io, "failed writing snapshots");
}

Trajectory read_snapshots(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  const auto modes = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  if (n < 1 || n > 2 || modes < 4 || modes > (1u << 20))
    throw Error(ErrorKind::io, "snapshot header is invalid");
  const Grid g(static_cast<int>(n), static_cast<int>(modes));
  Trajectory traj;
  for (std::uint64_t k = 0; k < count; ++k) {
    TrajectorySample s{0.0, SpectralState(g), {}};
    s.t = get<double>(in);
    s.state.t = s.t;
    for (int c = 0; c < 3; ++c)
      for (double& v : s.state.component(c).values()) v = get<double>(in);
    traj.append(std::move(s));
  }
  return traj;
}

}  // namespace plateflow
