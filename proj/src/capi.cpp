/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/plateflow.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "plateflow/errors.hpp"
#include "plateflow/experiment.hpp"

struct pf_config {
  plateflow::ExperimentConfig cfg;
};

struct pf_trajectory {
  plateflow::Trajectory traj;
};

struct pf_outcome {
  plateflow::ExperimentOutcome outcome;
};

namespace {

thread_local std::string last_error;

pf_status status_of(plateflow::ErrorKind kind) {
  using plateflow::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::tag_mismatch: return PF_ERR_INVALID_ARGUMENT;
    case ErrorKind::non_hurwitz: return PF_ERR_NON_HURWITZ;
    case ErrorKind::inadmissible_phi:
    case ErrorKind::inadmissible_params:
    case ErrorKind::hypothesis: return PF_ERR_HYPOTHESIS;
    case ErrorKind::blow_up:
    case ErrorKind::neumann_diverged:
    case ErrorKind::outer_diverged: return PF_ERR_SOLVER;
    case ErrorKind::non_positive_samples:
    case ErrorKind::window_too_small: return PF_ERR_FIT;
    case ErrorKind::config: return PF_ERR_CONFIG;
    case ErrorKind::io: return PF_ERR_IO;
  }
  return PF_ERR_INTERNAL;
}

template <class Fn>
pf_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const plateflow::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PF_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return PF_ERR_INTERNAL;
  }
}

pf_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return PF_ERR_INVALID_ARGUMENT;
}

void echo_set(plateflow::ExperimentConfig& cfg, const std::string& key,
              const std::string& value) {
  for (auto& [k, v] : cfg.echo)
    if (k == key) {
      v = value + "  # overridden";
      return;
    }
  cfg.echo.emplace_back(key, value + "  # overridden");
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* pf_version(void) { return "1.0.0"; }

const char* pf_last_error(void) { return last_error.c_str(); }

int pf_exit_code(pf_status status) {
  switch (status) {
    case PF_OK: return 0;
    case PF_ERR_INVALID_ARGUMENT:
    case PF_ERR_CONFIG:
    case PF_ERR_NON_HURWITZ:
    case PF_ERR_FIT:
    case PF_ERR_IO: return 2;
    case PF_ERR_HYPOTHESIS: return 3;
    case PF_ERR_SOLVER: return 4;
    case PF_ERR_INTERNAL: return 1;
  }
  return 1;
}

pf_status pf_config_load(const char* path, pf_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new pf_config{plateflow::load_experiment(path)};
    return PF_OK;
  });
}

pf_status pf_config_parse(const char* text, pf_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new pf_config{
        plateflow::parse_experiment(plateflow::ConfigDocument::parse(text))};
    return PF_OK;
  });
}

pf_status pf_config_default(pf_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new pf_config{
        plateflow::parse_experiment(plateflow::ConfigDocument::parse(""))};
    return PF_OK;
  });
}

void pf_config_free(pf_config* cfg) { delete cfg; }

pf_status pf_config_set_seed(pf_config* cfg, uint64_t seed) {
  if (!cfg) return null_argument("cfg");
  cfg->cfg.initial.seed = seed;
  echo_set(cfg->cfg, "initial.seed", std::to_string(seed));
  return PF_OK;
}

pf_status pf_config_set_output_dir(pf_config* cfg, const char* dir) {
  if (!cfg) return null_argument("cfg");
  if (!dir || !*dir) return null_argument("dir");
  return guarded([&] {
    cfg->cfg.out_dir = dir;
    echo_set(cfg->cfg, "output.dir", std::string("\"") + dir + "\"");
    return PF_OK;
  });
}

pf_status pf_config_set_force(pf_config* cfg, int force) {
  if (!cfg) return null_argument("cfg");
  cfg->cfg.force = force != 0;
  return PF_OK;
}

pf_status pf_config_set_hypothesis(pf_config* cfg, int n, double p, double mu,
                                   double omega) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] {
    auto& c = cfg->cfg;
    if (n > 0) {
      if (n != 1 && n != 2)
        throw plateflow::ConfigError(0, "grid.n", "dimension must be 1 or 2");
      c.n = c.params.n = n;
      echo_set(c, "grid.n", std::to_string(n));
    }
    if (!std::isnan(p)) {
      c.params.p = p;
      echo_set(c, "hypothesis.p", number_text(p));
    }
    if (!std::isnan(mu)) {
      c.params.mu = mu;
      echo_set(c, "hypothesis.mu", number_text(mu));
    }
    if (!std::isnan(omega)) {
      c.params.omega = omega;
      echo_set(c, "hypothesis.omega", number_text(omega));
    }
    return PF_OK;
  });
}

pf_status pf_eigenvalues(const double m[9], double re[3], double im[3]) {
  if (!m || !re || !im) return null_argument("m/re/im");
  return guarded([&] {
    plateflow::Mat3 mat;
    std::memcpy(mat.data(), m, sizeof(double) * 9);
    const auto ev = plateflow::characteristic_roots(mat);
    for (int j = 0; j < 3; ++j) {
      re[j] = ev[j].real();
      im[j] = ev[j].imag();
    }
    plateflow::eig_M(mat);
    return PF_OK;
  });
}

pf_status pf_spectrum(const pf_config* cfg, double re[3], double im[3],
                      double* spectral_bound, double* omega_max) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] {
    const auto r = plateflow::spectral_bound(cfg->cfg.coupling, cfg->cfg.grid());
    for (int j = 0; j < 3; ++j) {
      if (re) re[j] = r.eigenvalues[j].real();
      if (im) im[j] = r.eigenvalues[j].imag();
    }
    if (spectral_bound) *spectral_bound = r.spectral_bound;
    if (omega_max) *omega_max = r.omega_max;
    return PF_OK;
  });
}

pf_status pf_check_params(int n, double p, double mu, double omega, double a,
                          pf_hypotheses* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto r = plateflow::check_hypotheses({n, p, mu, omega, a});
    out->small_data = r.small_data;
    out->large_data = r.large_data;
    out->omega_admissible = r.omega_admissible;
    out->trace_boundary_case = r.trace_boundary_case;
    out->spectral_bound = r.spectral_bound;
    out->omega_max = r.omega_max;
    return PF_OK;
  });
}

pf_status pf_fit_decay(const double* t, const double* y, size_t count,
                       double t_lo, double t_hi, pf_fit_method method,
                       pf_decay_fit* out) {
  if ((!t || !y) && count) return null_argument("t/y");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto f = plateflow::fit_decay(
        std::vector<double>(t, t + count), std::vector<double>(y, y + count), t_lo,
        t_hi,
        method == PF_FIT_ENVELOPE ? plateflow::FitMethod::envelope
                                  : plateflow::FitMethod::regression);
    *out = {f.t_lo, f.t_hi, f.omega_fit, f.intercept, f.r2, f.points};
    return PF_OK;
  });
}

pf_status pf_simulate(const pf_config* cfg, pf_trajectory** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto& c = cfg->cfg;
    const auto x0 = plateflow::scaled_initial_state(c.initial, c.grid(), c.params);
    *out = new pf_trajectory{plateflow::simulate(c.system(), x0, c.stepper, c.params)};
    return PF_OK;
  });
}

pf_status pf_picard(const pf_config* cfg, pf_trajectory** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto& c = cfg->cfg;
    const auto x0 = plateflow::scaled_initial_state(c.initial, c.grid(), c.params);
    *out = new pf_trajectory{
        plateflow::picard_solve(c.system(), x0, c.picard, c.params).trajectory};
    return PF_OK;
  });
}

void pf_trajectory_free(pf_trajectory* traj) { delete traj; }

size_t pf_trajectory_size(const pf_trajectory* traj) {
  return traj ? traj->traj.size() : 0;
}

int pf_trajectory_status(const pf_trajectory* traj) {
  return traj ? static_cast<int>(traj->traj.status) : -1;
}

pf_status pf_trajectory_column(const pf_trajectory* traj, const char* name,
                               double* out) {
  if (!traj) return null_argument("traj");
  if (!name) return null_argument("name");
  if (!out && traj->traj.size()) return null_argument("out");
  const std::string col = name;
  using D = plateflow::Diagnostics;
  double D::*member = nullptr;
  if (col == "E") member = &D::energy;
  else if (col == "D") member = &D::dissipation;
  else if (col == "l2_Z") member = &D::l2_z;
  else if (col == "l2_U") member = &D::l2_u;
  else if (col == "l2_Theta") member = &D::l2_theta;
  else if (col == "norm_Xpmu") member = &D::norm_xpmu;
  else if (col == "norm_Xp") member = &D::norm_xp;
  else if (col != "t") {
    last_error = "unknown trajectory column '" + col + "'";
    return PF_ERR_INVALID_ARGUMENT;
  }
  for (std::size_t i = 0; i < traj->traj.size(); ++i) {
    const auto& s = traj->traj[i];
    out[i] = member ? s.diag.*member : s.t;
  }
  return PF_OK;
}

pf_status pf_run(const pf_config* cfg, pf_command cmd, const char* trajectory_csv,
                 pf_outcome** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  if (cmd < PF_CMD_SIMULATE || cmd > PF_CMD_CONVERGENCE) {
    last_error = "unknown command";
    return PF_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = new pf_outcome{plateflow::run_experiment(
        cfg->cfg, static_cast<plateflow::Command>(cmd),
        trajectory_csv ? trajectory_csv : "")};
    return PF_OK;
  });
}

void pf_outcome_free(pf_outcome* outcome) { delete outcome; }

int pf_outcome_exit_code(const pf_outcome* outcome) {
  return outcome ? outcome->outcome.exit_code : 1;
}

const char* pf_outcome_report(const pf_outcome* outcome) {
  return outcome ? outcome->outcome.report.c_str() : "";
}

size_t pf_outcome_file_count(const pf_outcome* outcome) {
  return outcome ? outcome->outcome.files.size() : 0;
}

const char* pf_outcome_file(const pf_outcome* outcome, size_t i) {
  if (!outcome || i >= outcome->outcome.files.size()) return nullptr;
  return outcome->outcome.files[i].c_str();
}

}  // extern "C"
