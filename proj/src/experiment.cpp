/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

const char* to_string(FitMethod m) {
  return m == FitMethod::regression ? "regression" : "envelope";
}

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "regression") return FitMethod::regression;
  if (name == "envelope") return FitMethod::envelope;
  throw Error(ErrorKind::invalid_argument, "unknown fit method '" + name + "'");
}

namespace {

struct Line {
  double slope = 0.0;
  double mx = 0.0, my = 0.0, syy = 0.0;
};

Line least_squares(const std::vector<double>& t, const std::vector<double>& y,
                   const std::vector<std::size_t>& points) {
  const double m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i : points) {
    sx += t[i];
    sy += std::log(y[i]);
  }
  Line l;
  l.mx = sx / m;
  l.my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i : points) {
    const double dx = t[i] - l.mx, dy = std::log(y[i]) - l.my;
    sxx += dx * dx;
    sxy += dx * dy;
    l.syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw Error(ErrorKind::window_too_small, "fit points share one time stamp");
  l.slope = sxy / sxx;
  return l;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y,
                   double t_lo, double t_hi, FitMethod method) {
  if (t.size() != y.size())
    throw Error(ErrorKind::invalid_argument, "fit_decay: t and y differ in length");
  if (!(t_lo < t_hi))
    throw Error(ErrorKind::window_too_small, "fit window must have t_lo < t_hi");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_hi));
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo - slack && t[i] <= t_hi + slack) window.push_back(i);
  if (window.size() < 10)
    throw Error(ErrorKind::window_too_small,
                "fit window holds " + std::to_string(window.size()) +
                    " samples, need at least 10");
  for (std::size_t i : window)
    if (!(y[i] > 0.0) || !std::isfinite(y[i]))
      throw Error(ErrorKind::non_positive_samples,
                  "norm sample at t=" + fmt("%g", t[i]) + " is not positive");

  std::vector<std::size_t> points = window;
  Line line = least_squares(t, y, points);
  if (method == FitMethod::envelope) {
    // Peaks of the log-norm with the current trend removed: the complex pair
    // can leave the raw norm monotone while it still oscillates about the
    // envelope.  Refit until the peak set settles.
    std::vector<std::size_t> prev;
    for (int pass = 0; pass < 20; ++pass) {
      auto r = [&](std::size_t i) { return std::log(y[i]) - line.slope * t[i]; };
      points.clear();
      for (std::size_t w = 1; w + 1 < window.size(); ++w) {
        const std::size_t i = window[w];
        if (r(i) > r(window[w - 1]) && r(i) >= r(window[w + 1])) points.push_back(i);
      }
      if (points.size() < 2)
        throw Error(ErrorKind::window_too_small,
                    "envelope fit found " + std::to_string(points.size()) +
                        " peaks, need at least 2");
      if (points == prev) break;
      line = least_squares(t, y, points);
      prev = points;
    }
  }
  const double slope = line.slope;
  const double syy = line.syy;
  const double my = line.my, mx = line.mx;
  DecayFit fit;
  fit.method = method;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.omega_fit = -slope;
  fit.intercept = my - slope * mx;
  fit.points = points.size();
  double ss_res = 0.0;
  for (std::size_t i : points) {
    const double r = std::log(y[i]) - (fit.intercept + slope * t[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

void compare_to_bound(DecayFit& fit, double spectral_bound) {
  fit.s_A = spectral_bound;
  fit.rel_gap = std::abs(fit.omega_fit + spectral_bound) / std::abs(spectral_bound);
}

void write_decay_csv(const std::vector<DecayFit>& fits, std::ostream& out) {
  out << "method,t_lo,t_hi,omega_fit,intercept,r2,s_A,rel_gap\n";
  char buf[512];
  for (const auto& f : fits) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(f.method), f.t_lo, f.t_hi, f.omega_fit, f.intercept,
                  f.r2, f.s_A, f.rel_gap);
    out << buf;
  }
}

double decay_constant(const Trajectory& traj, double sigma, double omega,
                      double x0_norm) {
  if (!(x0_norm > 0.0))
    throw Error(ErrorKind::invalid_argument, "decay_constant needs |x0| > 0");
  double c = 0.0;
  bool any = false;
  for (const auto& s : traj.samples()) {
    if (s.t < sigma - 1e-12) continue;
    c = std::max(c, s.diag.norm_xp * std::exp(omega * s.t) / x0_norm);
    any = true;
  }
  if (!any)
    throw Error(ErrorKind::window_too_small, "no samples at t >= sigma");
  return c;
}

// ---------------------------------------------------------------------------

std::vector<ScalarField> recover_W(const Trajectory& traj) {
  std::vector<ScalarField> out;
  out.reserve(traj.size());
  for (const auto& s : traj.samples()) out.push_back(laplacian_solve(s.state.z));
  return out;
}

PlateResidual plate_residual(const Trajectory& traj, const PlateSystem& sys) {
  PlateResidual r;
  if (traj.size() < 3) return r;
  const std::vector<ScalarField> w = recover_W(traj);
  const double pf = sys.grid.parseval_factor();
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double d1 = traj[i].t - traj[i - 1].t;
    const double d2 = traj[i + 1].t - traj[i].t;
    if (std::abs(d1 - d2) > 1e-9 * d1) continue;
    const SpectralState& x = traj[i].state;
    ScalarField res = w[i + 1] - w[i];
    res -= w[i] - w[i - 1];
    res *= 1.0 / (d1 * d1);
    // W_tt = U_t = Delta (M[1,:] x) + N(x)_U
    ScalarField lin = sys.coupling(1, 0) * x.z;
    lin.axpy(sys.coupling(1, 1), x.u);
    lin.axpy(sys.coupling(1, 2), x.theta);
    res -= laplacian_apply(lin);
    res -= eval_semilinear(x, sys).u;
    double sum = 0.0;
    for (double c : res.values()) sum += c * c;
    r.t.push_back(traj[i].t);
    r.residual.push_back(std::sqrt(pf * sum));
    r.max = std::max(r.max, r.residual.back());
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1), a pure function of (seed, component, mode).
double mode_draw(std::uint64_t seed, int component, int k1, int k2) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(component + 1));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(k1) << 20));
  h = splitmix64(h ^ static_cast<std::uint64_t>(k2));
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

SpectralState initial_state(const InitialSpec& spec, const Grid& grid) {
  SpectralState x(grid);
  if (spec.family == InitialFamily::modes) {
    for (const auto& m : spec.modes) {
      if (m.component < 0 || m.component > 2)
        throw Error(ErrorKind::invalid_argument, "mode component out of range");
      const int k2 = grid.dim() == 1 ? 0 : m.k2;
      if (m.k1 < 1 || m.k1 > grid.per_axis() ||
          (grid.dim() == 2 && (k2 < 1 || k2 > grid.per_axis())) ||
          (grid.dim() == 1 && m.k2 != 0))
        throw Error(ErrorKind::invalid_argument,
                    "mode (" + std::to_string(m.k1) + ", " +
                        std::to_string(m.k2) + ") is not on the grid");
      if (!std::isfinite(m.amplitude))
        throw Error(ErrorKind::invalid_argument, "mode amplitude is not finite");
      x.component(m.component)[grid.index_of(m.k1, k2)] += m.amplitude;
    }
  } else {
    const int cut = grid.modes() / 2;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto k = grid.mode_of(i);
      if (k[0] > cut || k[1] > cut) continue;
      const double weight =
          spec.ratio > 0.0 ? std::pow(spec.ratio, k[0] + k[1] - grid.dim()) : 1.0;
      for (int c = 0; c < 3; ++c)
        x.component(c)[i] = weight * mode_draw(spec.seed, c, k[0], k[1]);
    }
  }
  if (spec.variables == InitialVariables::w) x.z = laplacian_apply(x.z);
  return x;
}

SpectralState scaled_initial_state(const InitialSpec& spec, const Grid& grid,
                                   const HypothesisParams& params) {
  SpectralState x = initial_state(spec, grid);
  if (spec.amplitude > 0.0) {
    const double norm = state_norm(x, {NormKind::trace_pmu}, params);
    if (!(norm > 0.0))
      throw Error(ErrorKind::invalid_argument,
                  "cannot rescale vanishing initial data");
    x *= spec.amplitude / norm;
  }
  return x;
}

// ---------------------------------------------------------------------------

PlateSystem ExperimentConfig::system() const {
  PlateSystem sys(grid(), coupling, phi, a);
  sys.dealias = stepper.dealias;
  sys.overflow_guard = stepper.overflow_guard;
  return sys;
}

namespace {

[[noreturn]] void bad(const ConfigDocument& doc, const std::string& key,
                      const std::string& msg) {
  throw ConfigError(doc.line_of(key), key, msg);
}

int component_index(const std::string& name) {
  if (name == "Z" || name == "f") return 0;
  if (name == "U" || name == "g") return 1;
  if (name == "Theta" || name == "h") return 2;
  return -1;
}

}  // namespace

ExperimentConfig parse_experiment(const ConfigDocument& doc) {
  ExperimentConfig cfg;
  cfg.n = static_cast<int>(doc.integer("grid.n", 1));
  if (cfg.n != 1 && cfg.n != 2) bad(doc, "grid.n", "dimension must be 1 or 2");
  cfg.N = static_cast<int>(doc.integer("grid.N", 64));
  if (cfg.N < 4 || cfg.N > 4096) bad(doc, "grid.N", "N must lie in [4, 4096]");

  cfg.a = doc.number("model.a", 1.0);
  const std::string phi = doc.string("model.phi", "cubic");
  const long long power = doc.integer("model.phi_power", 3);
  if (phi == "zero") {
    cfg.phi = PhiModel::zero();
  } else if (phi == "cubic") {
    cfg.phi = PhiModel::cubic();
  } else if (phi == "odd_power") {
    if (power < 1 || power > 15) bad(doc, "model.phi_power", "power must lie in [1, 15]");
    cfg.phi = PhiModel::odd_power(static_cast<int>(power));
  } else if (phi == "smoothed_cubic") {
    cfg.phi = PhiModel::smoothed_cubic();
  } else {
    bad(doc, "model.phi",
        "unknown nonlinearity '" + phi +
            "' (zero, cubic, odd_power, smoothed_cubic)");
  }
  if (doc.has("model.coupling")) {
    const auto m = doc.numbers("model.coupling");
    if (m.size() != 9) bad(doc, "model.coupling", "expected 9 entries (row-major)");
    Mat3 mat;
    std::copy(m.begin(), m.end(), mat.begin());
    try {
      cfg.coupling = CouplingMatrix(mat);
    } catch (const Error& e) {
      bad(doc, "model.coupling", e.what());
    }
  }

  cfg.params.n = cfg.n;
  cfg.params.p = doc.number("hypothesis.p", 2.0);
  cfg.params.mu = doc.number("hypothesis.mu", 1.0);
  cfg.params.omega = doc.number("hypothesis.omega", 0.0);
  cfg.params.a = cfg.a;
  if (!(cfg.params.p >= 1.0)) bad(doc, "hypothesis.p", "p must be >= 1");

  InitialSpec& init = cfg.initial;
  const std::string family = doc.string("initial.family", "random");
  if (family == "random") init.family = InitialFamily::random;
  else if (family == "modes") init.family = InitialFamily::modes;
  else bad(doc, "initial.family", "expected 'random' or 'modes'");
  const std::string vars = doc.string("initial.variables", "x");
  if (vars == "x") init.variables = InitialVariables::x;
  else if (vars == "w") init.variables = InitialVariables::w;
  else bad(doc, "initial.variables", "expected 'x' or 'w'");
  const long long seed = doc.integer("initial.seed", 1);
  if (seed < 0) bad(doc, "initial.seed", "seed must be non-negative");
  init.seed = static_cast<std::uint64_t>(seed);
  init.ratio = doc.number("initial.ratio", 0.0);
  if (!(init.ratio >= 0.0 && init.ratio < 1.0))
    bad(doc, "initial.ratio", "ratio must lie in [0, 1)");
  init.amplitude = doc.number("initial.amplitude", 0.0);
  if (!(init.amplitude >= 0.0)) bad(doc, "initial.amplitude", "amplitude must be >= 0");
  if (doc.has("initial.modes")) {
    for (const auto& spec : doc.strings("initial.modes")) {
      std::istringstream in(spec);
      std::string comp;
      std::vector<double> nums;
      in >> comp;
      double v;
      while (in >> v) nums.push_back(v);
      if (!in.eof() || component_index(comp) < 0 ||
          nums.size() != static_cast<std::size_t>(cfg.n + 1))
        bad(doc, "initial.modes",
            "mode '" + spec + "' must read '<Z|U|Theta|f|g|h> k1" +
                (cfg.n == 2 ? " k2" : "") + " amplitude'");
      ModeTerm t;
      t.component = component_index(comp);
      t.k1 = static_cast<int>(nums[0]);
      t.k2 = cfg.n == 2 ? static_cast<int>(nums[1]) : 0;
      t.amplitude = nums.back();
      if (nums[0] != t.k1 || (cfg.n == 2 && nums[1] != t.k2) || t.k1 < 1 ||
          t.k1 >= cfg.N || (cfg.n == 2 && (t.k2 < 1 || t.k2 >= cfg.N)))
        bad(doc, "initial.modes", "mode '" + spec + "' is not on the grid");
      if (!std::isfinite(t.amplitude))
        bad(doc, "initial.modes", "amplitude in '" + spec + "' is not finite");
      init.modes.push_back(t);
    }
  }
  if (init.family == InitialFamily::modes && init.modes.empty())
    bad(doc, "initial.modes", "family 'modes' needs a non-empty modes list");

  StepperConfig& st = cfg.stepper;
  try {
    st.method = method_from_string(doc.string("solver.method", "etdrk2"));
  } catch (const Error& e) {
    bad(doc, "solver.method", e.what());
  }
  st.h = doc.number("solver.h", 1e-3);
  st.T = doc.number("solver.T", 1.0);
  try {
    step_count(st.h, st.T);
  } catch (const Error& e) {
    bad(doc, doc.has("solver.h") ? "solver.h" : "solver.T", e.what());
  }
  const long long every = doc.integer("solver.sample_every", 1);
  if (every < 1) bad(doc, "solver.sample_every", "must be >= 1");
  st.sample_every = static_cast<std::size_t>(every);
  st.dealias = doc.boolean("solver.dealias", true);
  st.overflow_guard = doc.number("solver.overflow_guard", 1e12);
  if (!(st.overflow_guard > 0.0)) bad(doc, "solver.overflow_guard", "must be > 0");

  PicardConfig& pc = cfg.picard;
  pc.h = st.h;
  pc.T = st.T;
  pc.sample_every = st.sample_every;
  pc.outer_tol = doc.number("solver.outer_tol", pc.outer_tol);
  pc.inner_tol = doc.number("solver.inner_tol", pc.inner_tol);
  pc.max_outer = static_cast<int>(doc.integer("solver.max_outer", pc.max_outer));
  pc.max_inner = static_cast<int>(doc.integer("solver.max_inner", pc.max_inner));
  if (!(pc.outer_tol > 0.0)) bad(doc, "solver.outer_tol", "must be > 0");
  if (!(pc.inner_tol > 0.0)) bad(doc, "solver.inner_tol", "must be > 0");
  if (pc.max_outer < 1) bad(doc, "solver.max_outer", "must be >= 1");
  if (pc.max_inner < 1) bad(doc, "solver.max_inner", "must be >= 1");

  FitSpec& fit = cfg.fit;
  fit.enabled = doc.has("fit.t_lo") || doc.has("fit.t_hi");
  fit.t_lo = doc.number("fit.t_lo", 0.0);
  fit.t_hi = doc.number("fit.t_hi", st.T);
  try {
    fit.method = fit_method_from_string(doc.string("fit.method", "envelope"));
  } catch (const Error& e) {
    bad(doc, "fit.method", e.what());
  }
  fit.norm = doc.string("fit.norm", "xpmu");
  if (fit.norm != "xpmu" && fit.norm != "xp")
    bad(doc, "fit.norm", "expected 'xpmu' or 'xp'");
  fit.tolerance = doc.number("fit.tolerance", 0.1);
  if (!(fit.tolerance > 0.0)) bad(doc, "fit.tolerance", "must be > 0");
  if (doc.has("fit.sigmas")) fit.sigmas = doc.numbers("fit.sigmas");
  if (fit.enabled) {
    if (!(fit.t_lo >= 0.0 && fit.t_lo < fit.t_hi))
      bad(doc, "fit.t_lo", "fit window needs 0 <= t_lo < t_hi");
    if (fit.t_hi > st.T * (1.0 + 1e-12))
      bad(doc, "fit.t_hi", "fit window must lie inside [0, T]");
  }
  for (double s : fit.sigmas)
    if (!(s >= 0.0 && s <= st.T)) bad(doc, "fit.sigmas", "sigma must lie in [0, T]");

  const std::string axis = doc.string("convergence.axis", "h");
  if (axis == "h") cfg.convergence.axis = ConvergenceAxis::h;
  else if (axis == "N") cfg.convergence.axis = ConvergenceAxis::N;
  else bad(doc, "convergence.axis", "expected 'h' or 'N'");
  cfg.convergence.levels = static_cast<int>(doc.integer("convergence.levels", 4));
  if (cfg.convergence.levels < 2 || cfg.convergence.levels > 8)
    bad(doc, "convergence.levels", "levels must lie in [2, 8]");
  cfg.convergence.reference_factor =
      static_cast<int>(doc.integer("convergence.reference_factor", 16));
  if (cfg.convergence.reference_factor < 2)
    bad(doc, "convergence.reference_factor", "must be >= 2");

  if (doc.has("probe.amplitudes")) {
    cfg.probe_amplitudes = doc.numbers("probe.amplitudes");
    for (std::size_t i = 0; i < cfg.probe_amplitudes.size(); ++i)
      if (!(cfg.probe_amplitudes[i] >= 0.0) ||
          (i > 0 && !(cfg.probe_amplitudes[i] > cfg.probe_amplitudes[i - 1])))
        bad(doc, "probe.amplitudes", "amplitudes must be >= 0 and increasing");
  }

  cfg.out_dir = doc.string("output.dir", cfg.out_dir);
  cfg.snapshots = doc.boolean("output.snapshots", false);

  doc.reject_unread();
  cfg.echo = doc.entries();
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(ConfigDocument::load(path));
}

// ---------------------------------------------------------------------------

std::string ProbeReport::to_text() const {
  std::ostringstream os;
  char buf[256];
  os << "amplitude        status     time       omega_fit    outer_factor\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-16.6g %-10s %-10.4g %-12s %-12s\n",
                  r.amplitude, to_string(r.status), r.event_time,
                  r.has_fit ? fmt("%.6f", r.omega_fit).c_str() : "undefined",
                  r.outer_factor > 0.0 ? fmt("%.4g", r.outer_factor).c_str() : "-");
    os << buf;
  }
  if (has_bracket) {
    std::snprintf(buf, sizeof buf,
                  "behaviour changes between amplitude %g and %g "
                  "(discretization dependent)\n",
                  decaying_below, failing_above);
    os << buf;
  } else {
    os << "no change of behaviour within the ladder\n";
  }
  return os.str();
}

ProbeReport smallness_probe(const PlateSystem& sys, const SpectralState& base,
                            const std::vector<double>& amplitudes,
                            const StepperConfig& stepper,
                            const HypothesisParams& params, const FitSpec& fit,
                            const PicardConfig* picard) {
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > amplitudes[i - 1]))
      throw Error(ErrorKind::invalid_argument, "probe amplitudes must increase");
  const double base_norm = state_norm(base, {NormKind::trace_pmu}, params);
  ProbeReport report;
  bool prev_ok = false;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double amp = amplitudes[i];
    SpectralState x0 = base;
    x0 *= base_norm > 0.0 ? amp / base_norm : 0.0;
    ProbeRow row;
    row.amplitude = amp;
    const Trajectory traj = simulate(sys, x0, stepper, params);
    row.status = traj.status;
    row.event_time = traj.status_time;
    row.message = traj.message;
    if (traj.status == Termination::completed && fit.enabled) {
      try {
        DecayFit f = fit_decay(traj.times(),
                               fit.norm == "xp" ? traj.xp_series() : traj.xpmu_series(),
                               fit.t_lo, fit.t_hi, fit.method);
        row.has_fit = true;
        row.omega_fit = f.omega_fit;
      } catch (const Error&) {
        row.has_fit = false;
      }
    }
    if (picard) {
      try {
        const PicardResult pr = picard_solve(sys, x0, *picard, params);
        for (double f : pr.outer_factors) row.outer_factor = std::max(row.outer_factor, f);
      } catch (const Diverged& e) {
        for (double f : e.factors()) row.outer_factor = std::max(row.outer_factor, f);
        if (row.status == Termination::completed) {
          row.status = Termination::diverged;
          row.message = e.what();
        }
      }
    }
    const bool ok = row.status == Termination::completed &&
                    (amp == 0.0 || (row.has_fit && row.omega_fit > 0.0));
    if (!ok && prev_ok && !report.has_bracket) {
      report.has_bracket = true;
      report.decaying_below = amplitudes[i - 1];
      report.failing_above = amp;
    }
    prev_ok = ok;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

SpectralState final_state(const PlateSystem& sys, const SpectralState& x0,
                          StepperConfig st, const HypothesisParams& params) {
  st.sample_every = step_count(st.h, st.T);
  const Trajectory traj = simulate(sys, x0, st, params);
  if (traj.status != Termination::completed)
    throw BlowUp(traj.status_time, "convergence run failed: " + traj.message);
  return traj.back().state;
}

SpectralState embed(const SpectralState& x, const Grid& fine) {
  SpectralState out(fine);
  const Grid& g = x.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.mode_of(i);
    const std::size_t j = fine.index_of(k[0], k[1]);
    for (int c = 0; c < 3; ++c) out.component(c)[j] = x.component(c)[i];
  }
  out.t = x.t;
  return out;
}

}  // namespace

ConvergenceReport convergence_study(const ExperimentConfig& cfg,
                                    ConvergenceAxis axis) {
  ConvergenceReport rep;
  rep.axis = axis;
  rep.method = cfg.stepper.method;
  const int levels = cfg.convergence.levels;
  const NormSpec norm{NormKind::trace_pmu};

  if (axis == ConvergenceAxis::h) {
    const PlateSystem sys = cfg.system();
    const SpectralState x0 = scaled_initial_state(cfg.initial, sys.grid, cfg.params);
    const double h_min = cfg.stepper.h / std::pow(2.0, levels - 1);
    StepperConfig ref = cfg.stepper;
    ref.h = h_min / cfg.convergence.reference_factor;
    rep.reference_h = ref.h;
    rep.reference_N = cfg.N;
    const SpectralState xr = final_state(sys, x0, ref, cfg.params);
    for (int l = 0; l < levels; ++l) {
      StepperConfig st = cfg.stepper;
      st.h = cfg.stepper.h / std::pow(2.0, l);
      ConvergenceRow row;
      row.h = st.h;
      row.N = cfg.N;
      row.error = state_norm(final_state(sys, x0, st, cfg.params) - xr, norm, cfg.params);
      rep.rows.push_back(row);
    }
  } else {
    const int n_ref = cfg.N << levels;
    const Grid ref_grid(cfg.n, n_ref);
    ExperimentConfig rc = cfg;
    rc.N = n_ref;
    InitialSpec spec = cfg.initial;
    spec.amplitude = 0.0;
    double scale = 1.0;
    if (cfg.initial.amplitude > 0.0) {
      const double nr = state_norm(initial_state(spec, ref_grid), norm, cfg.params);
      if (!(nr > 0.0))
        throw Error(ErrorKind::invalid_argument, "cannot rescale vanishing initial data");
      scale = cfg.initial.amplitude / nr;
    }
    rep.reference_h = cfg.stepper.h;
    rep.reference_N = n_ref;
    const SpectralState xr =
        final_state(rc.system(), scale * initial_state(spec, ref_grid), cfg.stepper,
                    cfg.params);
    for (int l = 0; l < levels; ++l) {
      ExperimentConfig lc = cfg;
      lc.N = cfg.N << l;
      const Grid g(cfg.n, lc.N);
      const SpectralState xl = final_state(
          lc.system(), scale * initial_state(spec, g), cfg.stepper, cfg.params);
      ConvergenceRow row;
      row.h = cfg.stepper.h;
      row.N = lc.N;
      row.error = state_norm(embed(xl, ref_grid) - xr, norm, cfg.params);
      rep.rows.push_back(row);
    }
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    auto& r = rep.rows[i];
    if (i == 0) {
      r.order = r.ratio = kNaN;
    } else {
      r.ratio = rep.rows[i - 1].error / r.error;
      r.order = std::log2(r.ratio);
    }
  }
  return rep;
}

void write_convergence_csv(const ConvergenceReport& r, std::ostream& out) {
  out << "axis,method,level,h,N,error,ratio,order\n";
  char buf[512];
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.17g,%d,%.17g,%.17g,%.17g\n",
                  r.axis == ConvergenceAxis::h ? "h" : "N", to_string(r.method), i,
                  row.h, row.N, row.error, row.ratio, row.order);
    out << buf;
  }
}

// ---------------------------------------------------------------------------

Command command_from_string(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "picard") return Command::picard;
  if (name == "spectrum") return Command::spectrum;
  if (name == "decay-fit" || name == "decay_fit") return Command::decay_fit;
  if (name == "check") return Command::check;
  if (name == "convergence") return Command::convergence;
  throw Error(ErrorKind::invalid_argument, "unknown command '" + name + "'");
}

std::pair<std::vector<double>, std::vector<double>> read_trajectory_series(
    std::istream& in, const std::string& column) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "empty trajectory CSV");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(ErrorKind::io, "trajectory CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ct = col("t"), cv = col(column);
  std::pair<std::vector<double>, std::vector<double>> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw Error(ErrorKind::io, "trajectory CSV line " + std::to_string(lineno) +
                                     " has the wrong number of cells");
    auto num = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size())
        throw Error(ErrorKind::io, "trajectory CSV line " + std::to_string(lineno) +
                                       ": cannot parse '" + s + "'");
      return v;
    };
    out.first.push_back(num(cells[ct]));
    out.second.push_back(num(cells[cv]));
  }
  return out;
}

namespace {

class OutputDir {
public:
  OutputDir(const std::string& dir, ExperimentOutcome& out) : dir_(dir), out_(out) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create '" + dir + "': " + ec.message());
  }

  template <class Fn>
  void write(const std::string& name, Fn&& fn, bool binary = false) {
    const std::filesystem::path p = dir_ / name;
    std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + p.string() + "' for writing");
    fn(f);
    f.close();
    if (!f) throw Error(ErrorKind::io, "failed writing '" + p.string() + "'");
    out_.files.push_back(p.string());
  }

private:
  std::filesystem::path dir_;
  ExperimentOutcome& out_;
};

void report_header(std::ostream& os, const ExperimentConfig& cfg, Command cmd,
                   const SpectrumReport& spec) {
  static const char* names[] = {"simulate", "picard", "spectrum",
                                "decay-fit", "check", "convergence"};
  os << "plateflow " << names[static_cast<int>(cmd)] << "\n\n[config]\n";
  for (const auto& [k, v] : cfg.echo) os << "  " << k << " = " << v << "\n";
  os << "\n[spectrum]\n";
  char buf[160];
  for (int j = 0; j < 3; ++j) {
    std::snprintf(buf, sizeof buf, "  mu_%d = %.12f %+.12fi\n", j + 1,
                  spec.eigenvalues[j].real(), spec.eigenvalues[j].imag());
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "  lambda_min = %d\n  s(A) = %.12f\n  ω window: [0, %.12f)\n",
                spec.lambda_min, spec.spectral_bound, spec.omega_max);
  os << buf;
}

std::vector<double> fit_series(const Trajectory& traj, const FitSpec& fit) {
  return fit.norm == "xp" ? traj.xp_series() : traj.xpmu_series();
}

void report_fits(std::ostream& os, const std::vector<DecayFit>& fits,
                 const std::vector<std::string>& failures, double tolerance) {
  os << "\n[fit]\n";
  char buf[256];
  for (const auto& f : fits) {
    std::snprintf(buf, sizeof buf,
                  "  %-10s window [%g, %g]  omega_fit = %.6f  r2 = %.6f  "
                  "points = %zu  rel_gap = %.4f  %s (tolerance %g)\n",
                  to_string(f.method), f.t_lo, f.t_hi, f.omega_fit, f.r2, f.points,
                  f.rel_gap, f.rel_gap <= tolerance ? "PASS" : "FAIL", tolerance);
    os << buf;
  }
  for (const auto& msg : failures) os << "  fit failed: " << msg << "\n";
}

void report_trajectory(std::ostream& os, const Trajectory& traj,
                       const PlateSystem& sys) {
  char buf[256];
  os << "\n[run]\n  status = " << to_string(traj.status) << "\n";
  std::snprintf(buf, sizeof buf, "  final time = %.6f\n  samples = %zu\n",
                traj.status_time, traj.size());
  os << buf;
  if (!traj.message.empty()) os << "  message = " << traj.message << "\n";
  const double e0 = traj[0].diag.energy;
  const auto& b = traj.balance;
  char rel[32] = "n/a";
  if (e0 > 0.0) std::snprintf(rel, sizeof rel, "%.3e", b.max_step_residual / e0);
  std::snprintf(buf, sizeof buf,
                "  E(0) = %.12g\n  E(end) = %.12g\n  energy residual: steps = %zu "
                "max/step = %.3e (%s E(0))  accumulated = %.3e  net = %.3e\n",
                e0, traj.back().diag.energy, b.steps, b.max_step_residual, rel,
                b.accumulated_residual, b.net_residual);
  os << buf;
  std::snprintf(buf, sizeof buf, "  |x(0)|_Xpmu = %.12g\n  |x(end)|_Xpmu = %.12g\n",
                traj[0].diag.norm_xpmu, traj.back().diag.norm_xpmu);
  os << buf;
  if (traj.status == Termination::completed) {
    const PlateResidual pr = plate_residual(traj, sys);
    if (!pr.t.empty()) {
      std::snprintf(buf, sizeof buf,
                    "  second-order residual (W_tt by central differences): max "
                    "%.3e over %zu samples\n",
                    pr.max, pr.t.size());
      os << buf;
    }
  }
}

std::vector<DecayFit> run_fits(const std::vector<double>& t,
                               const std::vector<double>& y, const FitSpec& fit,
                               const std::vector<FitMethod>& methods, double s_A,
                               std::vector<std::string>& failures) {
  std::vector<DecayFit> fits;
  for (FitMethod m : methods) {
    try {
      DecayFit f = fit_decay(t, y, fit.t_lo, fit.t_hi, m);
      compare_to_bound(f, s_A);
      fits.push_back(f);
    } catch (const Error& e) {
      failures.push_back(std::string(to_string(m)) + ": " + e.what());
    }
  }
  return fits;
}

void report_constants(std::ostream& os, const Trajectory& traj, const FitSpec& fit,
                      const std::vector<DecayFit>& fits) {
  if (fit.sigmas.empty() || fits.empty() || !(traj[0].diag.norm_xpmu > 0.0)) return;
  char buf[160];
  os << "\n[decay constants]\n";
  for (double s : fit.sigmas) {
    try {
      const double c = decay_constant(traj, s, fits[0].omega_fit, traj[0].diag.norm_xpmu);
      std::snprintf(buf, sizeof buf, "  C(%g) = %.6g\n", s, c);
      os << buf;
    } catch (const Error& e) {
      os << "  C(" << s << "): " << e.what() << "\n";
    }
  }
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, Command cmd,
                                 const std::string& trajectory_csv) {
  ExperimentOutcome out;
  std::ostringstream rep;
  const Grid grid = cfg.grid();
  HypothesisParams params = cfg.params;
  params.n = cfg.n;
  params.a = cfg.a;
  const SpectrumReport spec = spectral_bound(cfg.coupling, grid);
  const HypothesisReport hyp = check_hypotheses(params, cfg.coupling);

  if (cmd == Command::check) {
    out.report = hyp.to_text();
    out.exit_code = hyp.small_data ? exit_ok : exit_hypothesis;
    return out;
  }

  report_header(rep, cfg, cmd, spec);

  if (cmd == Command::spectrum) {
    OutputDir dir(cfg.out_dir, out);
    dir.write("spectrum.csv", [&](std::ostream& f) {
      char buf[160];
      f << "name,re,im\n";
      for (int j = 0; j < 3; ++j) {
        std::snprintf(buf, sizeof buf, "mu_%d,%.17g,%.17g\n", j + 1,
                      spec.eigenvalues[j].real(), spec.eigenvalues[j].imag());
        f << buf;
      }
      std::snprintf(buf, sizeof buf, "s_A,%.17g,0\nomega_max,%.17g,0\n",
                    spec.spectral_bound, spec.omega_max);
      f << buf;
    });
    out.report = rep.str();
    dir.write("report.txt", [&](std::ostream& f) { f << out.report; });
    return out;
  }

  rep << "\n[hypotheses]\n" << hyp.to_text();
  const PhiReport phi = inspect_phi(cfg.phi);
  std::string refusal;
  if (!hyp.small_data) refusal = "small-data hypothesis fails: " + hyp.small_data_failure();
  else if (!phi.admissible()) refusal = "nonlinearity " + cfg.phi.name() + " is inadmissible";
  else if (!(cfg.a > 0.0)) refusal = "coefficient a must be > 0";
  if (!refusal.empty()) {
    if (!cfg.force) {
      rep << "\nrefused: " << refusal << " (use --force to run anyway)\n";
      out.report = rep.str();
      out.exit_code = exit_hypothesis;
      return out;
    }
    rep << "\nforced past: " << refusal << "\n";
  }
  // Trace norms need p > 1 and mu in (1/p, 1] even when forced.
  trace_smoothness(params.p, params.mu);

  OutputDir dir(cfg.out_dir, out);
  const PlateSystem sys = cfg.system();

  auto finish = [&]() {
    out.report = rep.str();
    dir.write("report.txt", [&](std::ostream& f) { f << out.report; });
  };

  if (cmd == Command::convergence) {
    try {
      const ConvergenceReport cr = convergence_study(cfg, cfg.convergence.axis);
      dir.write("convergence.csv", [&](std::ostream& f) { write_convergence_csv(cr, f); });
      rep << "\n[convergence]\n";
      char buf[200];
      std::snprintf(buf, sizeof buf, "  axis = %s  method = %s  reference h = %g N = %d\n",
                    cr.axis == ConvergenceAxis::h ? "h" : "N", to_string(cr.method),
                    cr.reference_h, cr.reference_N);
      rep << buf;
      for (const auto& r : cr.rows) {
        std::snprintf(buf, sizeof buf, "  h = %-10g N = %-5d error = %.6e  order = %.4f\n",
                      r.h, r.N, r.error, r.order);
        rep << buf;
      }
    } catch (const BlowUp& e) {
      rep << "\nconvergence study failed: " << e.what() << "\n";
      out.exit_code = exit_solver;
    }
    finish();
    return out;
  }

  const SpectralState x0 = scaled_initial_state(cfg.initial, grid, params);

  if (cmd == Command::decay_fit) {
    if (!cfg.fit.enabled)
      throw ConfigError(0, "fit.t_lo", "decay-fit needs a fit window ([fit] t_lo, t_hi)");
    std::vector<double> t, y;
    if (!trajectory_csv.empty()) {
      std::ifstream in(trajectory_csv);
      if (!in) throw Error(ErrorKind::io, "cannot open '" + trajectory_csv + "'");
      std::tie(t, y) = read_trajectory_series(
          in, cfg.fit.norm == "xp" ? "norm_Xp" : "norm_Xpmu");
      rep << "\n[run]\n  series read from " << trajectory_csv << "\n";
    } else {
      out.trajectory = simulate(sys, x0, cfg.stepper, params);
      report_trajectory(rep, out.trajectory, sys);
      if (out.trajectory.status != Termination::completed) out.exit_code = exit_solver;
      t = out.trajectory.times();
      y = fit_series(out.trajectory, cfg.fit);
    }
    std::vector<std::string> failures;
    out.fits = run_fits(t, y, cfg.fit, {FitMethod::regression, FitMethod::envelope},
                        spec.spectral_bound, failures);
    report_fits(rep, out.fits, failures, cfg.fit.tolerance);
    if (!out.trajectory.empty()) report_constants(rep, out.trajectory, cfg.fit, out.fits);
    if (out.fits.empty() && out.exit_code == exit_ok) out.exit_code = exit_config;
    dir.write("decay.csv", [&](std::ostream& f) { write_decay_csv(out.fits, f); });
    finish();
    return out;
  }

  if (cmd == Command::picard) {
    try {
      const PicardResult pr = picard_solve(sys, x0, cfg.picard, params);
      out.trajectory = pr.trajectory;
      rep << "\n[picard]\n  outer iterations = " << pr.iterations << "\n";
      char buf[160];
      for (std::size_t m = 0; m < pr.outer_increments.size(); ++m) {
        std::snprintf(buf, sizeof buf,
                      "  outer %zu: increment = %.3e  factor = %s  inner iterations = %zu\n",
                      m + 1, pr.outer_increments[m],
                      m == 0 ? "-" : fmt("%.4f", pr.outer_factors[m - 1]).c_str(),
                      pr.inner_factors[m].size() + 1);
        rep << buf;
      }
    } catch (const Diverged& e) {
      rep << "\n[picard]\n  status = diverged\n  message = " << e.what() << "\n  factors =";
      for (double f : e.factors()) rep << " " << fmt("%.4g", f);
      rep << "\n";
      out.exit_code = exit_solver;
      finish();
      return out;
    }
  } else {
    out.trajectory = simulate(sys, x0, cfg.stepper, params);
  }

  report_trajectory(rep, out.trajectory, sys);
  if (out.trajectory.status != Termination::completed) out.exit_code = exit_solver;
  if (cfg.fit.enabled && out.trajectory.status == Termination::completed) {
    std::vector<std::string> failures;
    out.fits = run_fits(out.trajectory.times(), fit_series(out.trajectory, cfg.fit),
                        cfg.fit, {cfg.fit.method}, spec.spectral_bound, failures);
    report_fits(rep, out.fits, failures, cfg.fit.tolerance);
    report_constants(rep, out.trajectory, cfg.fit, out.fits);
  }
  dir.write("trajectory.csv",
            [&](std::ostream& f) { write_trajectory_csv(out.trajectory, f); });
  dir.write("decay.csv", [&](std::ostream& f) { write_decay_csv(out.fits, f); });
  if (!cfg.probe_amplitudes.empty()) {
    const ProbeReport probe =
        smallness_probe(sys, x0, cfg.probe_amplitudes, cfg.stepper, params, cfg.fit,
                        cmd == Command::picard ? &cfg.picard : nullptr);
    rep << "\n[probe]\n" << probe.to_text();
    dir.write("probe.csv", [&](std::ostream& f) {
      char buf[200];
      f << "amplitude,status,event_time,omega_fit,outer_factor\n";
      for (const auto& r : probe.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%s,%.17g\n", r.amplitude,
                      to_string(r.status), r.event_time,
                      r.has_fit ? fmt("%.17g", r.omega_fit).c_str() : "", r.outer_factor);
        f << buf;
      }
    });
  }
  if (cfg.snapshots)
    dir.write("snapshots.bin",
              [&](std::ostream& f) { write_snapshots(out.trajectory, f); }, true);
  finish();
  return out;
}

}  // namespace plateflow
