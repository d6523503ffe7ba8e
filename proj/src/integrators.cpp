/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plateflow/errors.hpp"

namespace plateflow {

const char* to_string(Method m) {
  switch (m) {
    case Method::exp_euler: return "exp_euler";
    case Method::etdrk2: return "etdrk2";
    case Method::imex_cn: return "imex_cn";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "exp_euler") return Method::exp_euler;
  if (name == "etdrk2") return Method::etdrk2;
  if (name == "imex_cn") return Method::imex_cn;
  throw Error(ErrorKind::invalid_argument, "unknown method '" + name + "'");
}

std::size_t step_count(double h, double T) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::invalid_argument, "step size h must be > 0");
  if (!(T > 0.0) || !std::isfinite(T))
    throw Error(ErrorKind::invalid_argument, "final time T must be > 0");
  const double ratio = T / h;
  const double n = std::round(ratio);
  if (n < 1.0 || n > 1e7)
    throw Error(ErrorKind::invalid_argument, "T/h must lie in [1, 1e7]");
  if (std::abs(ratio - n) > 1e-9 * n)
    throw Error(ErrorKind::invalid_argument, "T must be a multiple of h");
  return static_cast<std::size_t>(n);
}

SpectralState step_exp_euler(const PlateOperator& op, const SpectralState& x,
                             const NonlinearTerm& n) {
  return op.exp_euler_update(x, n(x));
}

SpectralState step_etdrk2(const PlateOperator& op, const SpectralState& x,
                          const NonlinearTerm& n) {
  const SpectralState nx = n(x);
  SpectralState a = op.exp_euler_update(x, nx);
  const SpectralState na = n(a);
  op.add_phi2(a, na - nx);
  return a;
}

namespace {

NonlinearTerm semilinear_term(const PlateSystem& sys) {
  return [&sys](const SpectralState& x) { return eval_semilinear(x, sys); };
}

}  // namespace

SpectralState step_exp_euler(const SpectralState& x, double h,
                             const PlateSystem& sys) {
  return step_exp_euler(PlateOperator(sys.grid, sys.coupling, h), x,
                        semilinear_term(sys));
}

SpectralState step_etdrk2(const SpectralState& x, double h,
                          const PlateSystem& sys) {
  return step_etdrk2(PlateOperator(sys.grid, sys.coupling, h), x,
                     semilinear_term(sys));
}

// ---------------------------------------------------------------------------

namespace {

Mat3 inverse3(const Mat3& m) {
  const double c00 = m[4] * m[8] - m[5] * m[7];
  const double c01 = m[5] * m[6] - m[3] * m[8];
  const double c02 = m[3] * m[7] - m[4] * m[6];
  const double det = m[0] * c00 + m[1] * c01 + m[2] * c02;
  if (det == 0.0 || !std::isfinite(det))
    throw Error(ErrorKind::invalid_argument, "singular 3x3 block");
  const double inv = 1.0 / det;
  return {c00 * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
          (m[1] * m[5] - m[2] * m[4]) * inv,
          c01 * inv, (m[0] * m[8] - m[2] * m[6]) * inv,
          (m[2] * m[3] - m[0] * m[5]) * inv,
          c02 * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
          (m[0] * m[4] - m[1] * m[3]) * inv};
}

}  // namespace

CrankNicolsonBlocks::CrankNicolsonBlocks(const Grid& grid,
                                         const CouplingMatrix& coupling,
                                         double h)
    : grid_(grid), h_(h) {
  propagator_.resize(grid.size());
  resolvent_.resize(grid.size());
  const Mat3 eye = identity3();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mat3 b = -static_cast<double>(grid.eigenvalue(i)) * coupling.matrix();
    const Mat3 r = inverse3(eye - (0.5 * h) * b);
    resolvent_[i] = r;
    propagator_[i] = r * (eye + (0.5 * h) * b);
  }
}

SpectralState CrankNicolsonBlocks::step(const SpectralState& x,
                                        const SpectralState& n) const {
  SpectralState out(grid_);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Vec3 a = propagator_[i] * Vec3{x.z[i], x.u[i], x.theta[i]};
    const Vec3 b = resolvent_[i] * Vec3{n.z[i], n.u[i], n.theta[i]};
    out.z[i] = a[0] + h_ * b[0];
    out.u[i] = a[1] + h_ * b[1];
    out.theta[i] = a[2] + h_ * b[2];
  }
  out.t = x.t + h_;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double sum_squares(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return s;
}

double quadratic_energy(const SpectralState& x) {
  return 0.5 * x.grid().parseval_factor() *
         (sum_squares(x.z) + sum_squares(x.u) + sum_squares(x.theta));
}

double dissipation(const SpectralState& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.theta.size(); ++i)
    s += x.grid().eigenvalue(i) * x.theta[i] * x.theta[i];
  return x.grid().parseval_factor() * s;
}

struct BalanceTracker {
  EnergyBalance balance;
  double energy = 0.0;
  double diss = 0.0;

  void start(double e, double d) {
    energy = e;
    diss = d;
  }
  void advance(double e, double d, double h) {
    const double r = e - energy + 0.5 * h * (diss + d);
    ++balance.steps;
    balance.max_step_residual = std::max(balance.max_step_residual, std::abs(r));
    balance.accumulated_residual += std::abs(r);
    balance.net_residual += r;
    energy = e;
    diss = d;
  }
};

// Coefficients of strongly damped modes underflow into subnormals, which are
// very slow on most hardware and carry no information.
void flush_subnormals(SpectralState& x) {
  for (int c = 0; c < 3; ++c)
    for (double& v : x.component(c).values())
      if (std::abs(v) < std::numeric_limits<double>::min()) v = 0.0;
}

double total_energy(const SpectralState& x, const PlateSystem& sys) {
  return quadratic_energy(x) + potential_energy(x, sys);
}

}  // namespace

Diagnostics diagnose(const SpectralState& x, const PlateSystem& sys,
                     const HypothesisParams& params) {
  Diagnostics d;
  d.energy = total_energy(x, sys);
  d.dissipation = dissipation(x);
  const double pf = x.grid().parseval_factor();
  d.l2_z = std::sqrt(pf * sum_squares(x.z));
  d.l2_u = std::sqrt(pf * sum_squares(x.u));
  d.l2_theta = std::sqrt(pf * sum_squares(x.theta));
  d.norm_xpmu = state_norm(x, {NormKind::trace_pmu}, params);
  d.norm_xp = state_norm(x, {NormKind::trace_p}, params);
  return d;
}

Trajectory simulate(const PlateSystem& sys_in, const SpectralState& x0,
                    const StepperConfig& cfg, const HypothesisParams& params) {
  if (!(x0.grid() == sys_in.grid))
    throw Error(ErrorKind::invalid_argument, "initial state grid mismatch");
  if (cfg.sample_every == 0)
    throw Error(ErrorKind::invalid_argument, "sample_every must be >= 1");
  if (!x0.all_finite())
    throw Error(ErrorKind::invalid_argument, "initial state is not finite");
  trace_smoothness(params.p, params.mu);

  PlateSystem sys = sys_in;
  sys.dealias = cfg.dealias;
  sys.overflow_guard = cfg.overflow_guard;
  const std::size_t steps = step_count(cfg.h, cfg.T);
  const NonlinearTerm rhs = semilinear_term(sys);

  std::function<SpectralState(const SpectralState&)> advance;
  std::unique_ptr<PlateOperator> op;
  std::unique_ptr<CrankNicolsonBlocks> cn;
  switch (cfg.method) {
    case Method::exp_euler:
      op = std::make_unique<PlateOperator>(sys.grid, sys.coupling, cfg.h);
      advance = [&](const SpectralState& x) { return step_exp_euler(*op, x, rhs); };
      break;
    case Method::etdrk2:
      op = std::make_unique<PlateOperator>(sys.grid, sys.coupling, cfg.h);
      advance = [&](const SpectralState& x) { return step_etdrk2(*op, x, rhs); };
      break;
    case Method::imex_cn:
      cn = std::make_unique<CrankNicolsonBlocks>(sys.grid, sys.coupling, cfg.h);
      advance = [&](const SpectralState& x) { return cn->step(x, rhs(x)); };
      break;
  }

  Trajectory traj;
  const double t0 = x0.t;
  traj.append({t0, x0, diagnose(x0, sys, params)});
  BalanceTracker tracker;
  tracker.start(traj.back().diag.energy, traj.back().diag.dissipation);

  SpectralState x = x0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = t0 + static_cast<double>(s) * cfg.h;
    SpectralState next(sys.grid);
    try {
      next = advance(x);
    } catch (const BlowUp& e) {
      traj.status = Termination::blowup;
      traj.status_time = e.time();
      traj.message = e.what();
      break;
    }
    next.t = t;
    flush_subnormals(next);
    const double energy = next.all_finite() ? total_energy(next, sys) : NAN;
    if (!std::isfinite(energy)) {
      traj.status = Termination::blowup;
      traj.status_time = t;
      std::ostringstream os;
      os << "blow-up at t=" << t << ": non-finite state or energy";
      traj.message = os.str();
      break;
    }
    const double diss = dissipation(next);
    tracker.advance(energy, diss, cfg.h);
    x = std::move(next);
    if (s % cfg.sample_every == 0 || s == steps)
      traj.append({t, x, diagnose(x, sys, params)});
  }
  traj.balance = tracker.balance;
  if (traj.status == Termination::completed) traj.status_time = traj.back().t;
  return traj;
}

// ---------------------------------------------------------------------------

StatePath::StatePath(Grid grid, double t0, double h, std::size_t steps)
    : grid_(std::move(grid)), t0_(t0), h_(h), steps_(steps),
      data_((steps + 1) * 3 * grid_.size(), 0.0) {}

StatePath StatePath::constant(const SpectralState& x0, double h,
                              std::size_t steps) {
  StatePath p(x0.grid(), x0.t, h, steps);
  for (std::size_t n = 0; n <= steps; ++n) p.set(n, x0);
  return p;
}

SpectralState StatePath::state(std::size_t n) const {
  SpectralState x(grid_);
  const std::size_t m = grid_.size();
  const double* src = data_.data() + n * 3 * m;
  for (int c = 0; c < 3; ++c) {
    auto dst = x.component(c).values();
    std::copy(src + c * m, src + (c + 1) * m, dst.begin());
  }
  x.t = time(n);
  return x;
}

ScalarField StatePath::z(std::size_t n) const {
  const std::size_t m = grid_.size();
  const double* src = data_.data() + n * 3 * m;
  return {grid_, Representation::spectral, std::vector<double>(src, src + m)};
}

void StatePath::set(std::size_t n, const SpectralState& x) {
  const std::size_t m = grid_.size();
  double* dst = data_.data() + n * 3 * m;
  for (int c = 0; c < 3; ++c) {
    auto src = x.component(c).values();
    std::copy(src.begin(), src.end(), dst + c * m);
  }
}

namespace {

bool diverging(const std::vector<double>& factors) {
  if (factors.size() < 3) return false;
  return std::all_of(factors.end() - 3, factors.end(),
                     [](double f) { return f >= 1.0; });
}

}  // namespace

FrozenSolution solve_frozen_coefficient(const PlateSystem& sys,
                                        const CoefficientPath& v,
                                        const SpectralState& x0,
                                        const PicardConfig& cfg,
                                        const HypothesisParams& params) {
  const std::size_t steps = step_count(cfg.h, cfg.T);
  const PlateOperator op(sys.grid, sys.coupling, cfg.h);
  const NormSpec norm{NormKind::trace_pmu};

  FrozenSolution sol{StatePath(sys.grid, x0.t, cfg.h, steps), {}, {}, 0};
  StatePath next(sys.grid, x0.t, cfg.h, steps);
  StatePath& w = sol.x;  // w_j; becomes x = v + w on return

  for (int j = 1; j <= cfg.max_inner; ++j) {
    double increment = 0.0;
    SpectralState vn = x0;
    SpectralState wn(sys.grid);
    wn.t = x0.t;
    try {
      for (std::size_t n = 0; n < steps; ++n) {
        // B(V)(v + w_j) + f(V, v + w_j) = B(V) w_j + f(V, w_j) + g by
        // linearity in the second slot, with g = B(V) v + f(V, v).
        SpectralState xn = w.state(n);
        xn += vn;
        xn.t = w.time(n);
        QuasilinearParts parts = eval_quasilinear(xn, v(n), sys);
        parts.principal += parts.lower;
        wn = op.exp_euler_update(wn, parts.principal);
        flush_subnormals(wn);
        next.set(n + 1, wn);
        increment = std::max(
            increment, state_norm(wn - w.state(n + 1), norm, params));
        vn = op.apply_exp(vn);
        flush_subnormals(vn);
      }
    } catch (const BlowUp& e) {
      throw Diverged(ErrorKind::neumann_diverged, sol.factors,
                     std::string("Neumann iterate exceeded the overflow guard: ") +
                         e.what());
    }
    if (!std::isfinite(increment))
      throw Diverged(ErrorKind::neumann_diverged, sol.factors,
                     "Neumann iterate became non-finite");
    if (!sol.increments.empty() && sol.increments.back() > 0.0)
      sol.factors.push_back(increment / sol.increments.back());
    sol.increments.push_back(increment);
    sol.iterations = j;
    std::swap(w, next);

    if (increment <= cfg.inner_tol) {
      SpectralState vpath = x0;
      for (std::size_t n = 0; n <= steps; ++n) {
        SpectralState xn = w.state(n);
        xn += vpath;
        w.set(n, xn);
        vpath = op.apply_exp(vpath);
        flush_subnormals(vpath);
      }
      return sol;
    }
    if (diverging(sol.factors)) {
      std::ostringstream os;
      os << "Neumann iteration diverged: contraction factors >= 1 for 3 "
            "consecutive iterations (last "
         << sol.factors.back() << ")";
      throw Diverged(ErrorKind::neumann_diverged, sol.factors, os.str());
    }
  }
  throw Diverged(ErrorKind::neumann_diverged, sol.factors,
                 "Neumann iteration did not reach the inner tolerance within " +
                     std::to_string(cfg.max_inner) + " iterations");
}

Trajectory to_trajectory(const StatePath& path, const PlateSystem& sys,
                         const HypothesisParams& params,
                         std::size_t sample_every) {
  if (sample_every == 0)
    throw Error(ErrorKind::invalid_argument, "sample_every must be >= 1");
  Trajectory traj;
  BalanceTracker tracker;
  for (std::size_t n = 0; n <= path.steps(); ++n) {
    const SpectralState x = path.state(n);
    const bool keep = n % sample_every == 0 || n == path.steps();
    if (keep) {
      traj.append({x.t, x, diagnose(x, sys, params)});
      if (n == 0) tracker.start(traj.back().diag.energy, traj.back().diag.dissipation);
      else tracker.advance(traj.back().diag.energy, traj.back().diag.dissipation,
                           n == 0 ? 0.0 : path.step());
      continue;
    }
    tracker.advance(total_energy(x, sys), dissipation(x), path.step());
  }
  traj.balance = tracker.balance;
  traj.status_time = traj.back().t;
  return traj;
}

PicardResult picard_solve(const PlateSystem& sys, const SpectralState& x0,
                          const PicardConfig& cfg,
                          const HypothesisParams& params) {
  if (!(cfg.outer_tol > 0.0) || !(cfg.inner_tol > 0.0))
    throw Error(ErrorKind::invalid_argument, "tolerances must be positive");
  trace_smoothness(params.p, params.mu);
  const std::size_t steps = step_count(cfg.h, cfg.T);
  const NormSpec norm{NormKind::trace_pmu};

  PicardResult result;
  StatePath iterate = StatePath::constant(x0, cfg.h, steps);
  for (int m = 1; m <= cfg.max_outer; ++m) {
    FrozenSolution sol = solve_frozen_coefficient(
        sys, [&iterate](std::size_t n) { return iterate.z(n); }, x0, cfg,
        params);
    double increment = 0.0;
    for (std::size_t n = 0; n <= steps; ++n)
      increment = std::max(
          increment, state_norm(sol.x.state(n) - iterate.state(n), norm, params));
    if (!std::isfinite(increment))
      throw Diverged(ErrorKind::outer_diverged, result.outer_factors,
                     "Picard iterate became non-finite");
    if (!result.outer_increments.empty() && result.outer_increments.back() > 0.0)
      result.outer_factors.push_back(increment / result.outer_increments.back());
    result.outer_increments.push_back(increment);
    result.inner_factors.push_back(sol.factors);
    result.iterations = m;
    iterate = std::move(sol.x);

    if (increment <= cfg.outer_tol) {
      result.trajectory = to_trajectory(iterate, sys, params, cfg.sample_every);
      return result;
    }
    if (diverging(result.outer_factors)) {
      std::ostringstream os;
      os << "Picard iteration diverged: contraction factors >= 1 for 3 "
            "consecutive iterations (last "
         << result.outer_factors.back() << ")";
      throw Diverged(ErrorKind::outer_diverged, result.outer_factors, os.str());
    }
  }
  throw Diverged(ErrorKind::outer_diverged, result.outer_factors,
                 "Picard iteration did not converge within " +
                     std::to_string(cfg.max_outer) + " iterations");
}

}  // namespace plateflow
