/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

double ipow(double s, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= s;
  return r;
}

}  // namespace

PhiModel PhiModel::odd_power(int m) {
  if (m < 1)
    throw Error(ErrorKind::invalid_argument, "odd_power exponent must be >= 1");
  return PhiModel(PhiKind::odd_power, m);
}

std::string PhiModel::name() const {
  switch (kind_) {
    case PhiKind::zero: return "zero";
    case PhiKind::cubic: return "cubic";
    case PhiKind::odd_power: return "odd_power(m=" + std::to_string(m_) + ")";
    case PhiKind::smoothed_cubic: return "smoothed_cubic";
  }
  return "?";
}

double PhiModel::value(double s) const noexcept {
  switch (kind_) {
    case PhiKind::zero: return 0.0;
    case PhiKind::cubic: return s * s * s;
    case PhiKind::odd_power: return ipow(s, m_);
    case PhiKind::smoothed_cubic: return s * s * s / (1.0 + s * s);
  }
  return 0.0;
}

double PhiModel::derivative(double s) const noexcept {
  switch (kind_) {
    case PhiKind::zero: return 0.0;
    case PhiKind::cubic: return 3.0 * s * s;
    case PhiKind::odd_power: return m_ * ipow(s, m_ - 1);
    case PhiKind::smoothed_cubic: {
      const double q = 1.0 + s * s;
      return (s * s * s * s + 3.0 * s * s) / (q * q);
    }
  }
  return 0.0;
}

double PhiModel::second_derivative(double s) const noexcept {
  switch (kind_) {
    case PhiKind::zero: return 0.0;
    case PhiKind::cubic: return 6.0 * s;
    case PhiKind::odd_power:
      return m_ >= 2 ? m_ * (m_ - 1) * ipow(s, m_ - 2) : 0.0;
    case PhiKind::smoothed_cubic: {
      const double q = 1.0 + s * s;
      return (6.0 * s - 2.0 * s * s * s) / (q * q * q);
    }
  }
  return 0.0;
}

double PhiModel::antiderivative(double s) const noexcept {
  switch (kind_) {
    case PhiKind::zero: return 0.0;
    case PhiKind::cubic: return 0.25 * s * s * s * s;
    case PhiKind::odd_power: return ipow(s, m_ + 1) / (m_ + 1);
    case PhiKind::smoothed_cubic: return 0.5 * s * s - 0.5 * std::log1p(s * s);
  }
  return 0.0;
}

PhiReport inspect_phi(const PhiModel& phi) {
  PhiReport r;
  r.phi_at_zero = phi.value(0.0);
  r.dphi_at_zero = phi.derivative(0.0);
  r.ddphi_at_zero = phi.second_derivative(0.0);
  r.vanishes_at_zero = std::abs(r.phi_at_zero) <= 1e-14 &&
                       std::abs(r.dphi_at_zero) <= 1e-14 &&
                       std::abs(r.ddphi_at_zero) <= 1e-14;

  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  constexpr double delta = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double s = dist(rng);
    const double fd1 = (phi.value(s + delta) - phi.value(s - delta)) / (2 * delta);
    const double fd2 =
        (phi.derivative(s + delta) - phi.derivative(s - delta)) / (2 * delta);
    const double d1 = phi.derivative(s);
    const double d2 = phi.second_derivative(s);
    worst = std::max(worst, std::abs(fd1 - d1) / std::max(1.0, std::abs(d1)));
    worst = std::max(worst, std::abs(fd2 - d2) / std::max(1.0, std::abs(d2)));
  }
  r.max_derivative_error = worst;
  r.derivatives_consistent = worst <= 1e-6;

  r.monotone = true;
  for (int i = 0; i <= 2000; ++i) {
    const double s = -10.0 + 20.0 * i / 2000.0;
    if (phi.derivative(s) < 0.0) {
      r.monotone = false;
      break;
    }
  }
  return r;
}

PhiReport validate_phi(const PhiModel& phi) {
  PhiReport r = inspect_phi(phi);
  if (!r.admissible()) {
    std::ostringstream os;
    os << "nonlinearity " << phi.name() << " is inadmissible:";
    if (!r.vanishes_at_zero)
      os << " phi(0)=" << r.phi_at_zero << " phi'(0)=" << r.dphi_at_zero
         << " phi''(0)=" << r.ddphi_at_zero << " (all must vanish);";
    if (!r.derivatives_consistent)
      os << " derivative mismatch " << r.max_derivative_error << ";";
    throw Error(ErrorKind::inadmissible_phi, os.str());
  }
  return r;
}

// ---------------------------------------------------------------------------

PlateSystem::PlateSystem(Grid grid_, CouplingMatrix coupling_, PhiModel phi_,
                         double a_)
    : grid(std::move(grid_)), coupling(std::move(coupling_)), phi(phi_), a(a_) {
  if (!std::isfinite(a))
    throw Error(ErrorKind::invalid_argument, "material constant must be finite");
}

namespace {

ScalarField maybe_dealias(const ScalarField& f, const PlateSystem& sys) {
  return sys.dealias ? dealias(f) : f;
}

void guard(const ScalarField& f, const PlateSystem& sys, double t,
           const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i];
    if (!std::isfinite(v) || std::abs(v) > sys.overflow_guard) {
      std::ostringstream os;
      os << "blow-up at t=" << t << ": |" << what << "| = " << std::abs(v)
         << " exceeds guard " << sys.overflow_guard;
      throw BlowUp(t, os.str());
    }
  }
}

// a * M e_1 * g  as a state increment (g spectral).
SpectralState route(const ScalarField& g, const PlateSystem& sys, double t) {
  SpectralState out(sys.grid);
  for (int c = 0; c < 3; ++c) {
    const double w = sys.a * sys.coupling(c, 0);
    if (w != 0.0) out.component(c).axpy(w, g);
  }
  out.t = t;
  return out;
}

}  // namespace

SpectralState eval_semilinear(const SpectralState& x, const PlateSystem& sys) {
  ScalarField z = dst_inverse(maybe_dealias(x.z, sys));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = sys.phi.value(z[i]);
  guard(z, sys, x.t, "phi(Z)");
  const ScalarField lap = laplacian_apply(maybe_dealias(dst_forward(z), sys));
  return route(lap, sys, x.t);
}

QuasilinearParts eval_quasilinear(const SpectralState& x, const ScalarField& v,
                                  const PlateSystem& sys) {
  const ScalarField vs =
      maybe_dealias(v.is_spectral() ? v : dst_forward(v), sys);
  const ScalarField zs = maybe_dealias(x.z, sys);

  const ScalarField v_nodes = dst_inverse(vs);
  const ScalarField lap_z = dst_inverse(laplacian_apply(zs));
  const auto grad_v = gradient(vs);
  const auto grad_z = gradient(zs);

  ScalarField principal(sys.grid, Representation::physical);
  ScalarField lower(sys.grid, Representation::physical);
  for (std::size_t i = 0; i < principal.size(); ++i) {
    double dot = 0.0;
    for (std::size_t d = 0; d < grad_v.size(); ++d)
      dot += grad_v[d][i] * grad_z[d][i];
    principal[i] = sys.phi.derivative(v_nodes[i]) * lap_z[i];
    lower[i] = sys.phi.second_derivative(v_nodes[i]) * dot;
  }
  guard(principal, sys, x.t, "phi'(V) Delta Z");
  guard(lower, sys, x.t, "phi''(V) grad V . grad Z");
  return {route(maybe_dealias(dst_forward(principal), sys), sys, x.t),
          route(maybe_dealias(dst_forward(lower), sys), sys, x.t)};
}

double potential_energy(const SpectralState& x, const PlateSystem& sys) {
  if (sys.phi.kind() == PhiKind::zero || sys.a == 0.0) return 0.0;
  const ScalarField z = dst_inverse(maybe_dealias(x.z, sys));
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += sys.phi.antiderivative(z[i]);
  return sys.a * sys.grid.cell_volume() * sum;
}

}  // namespace plateflow
