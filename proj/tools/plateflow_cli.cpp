/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
// plateflow simulate|picard|spectrum|decay-fit|check|convergence
//   --config <path> [--force] [--seed <u64>] [--out <dir>]

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "plateflow/plateflow.h"

namespace {

struct Options {
  std::string config;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string trajectory;
  std::optional<int> n;
  std::optional<double> p, mu, omega;
};

int fail(pf_status st) {
  std::fprintf(stderr, "plateflow: %s\n", pf_last_error());
  return pf_exit_code(st);
}

int run(pf_command cmd, const Options& opt) {
  pf_config* cfg = nullptr;
  pf_status st = opt.config.empty() ? pf_config_default(&cfg)
                                    : pf_config_load(opt.config.c_str(), &cfg);
  if (st != PF_OK) return fail(st);

  if (opt.seed) st = pf_config_set_seed(cfg, *opt.seed);
  if (st == PF_OK && opt.out) st = pf_config_set_output_dir(cfg, opt.out->c_str());
  if (st == PF_OK) st = pf_config_set_force(cfg, opt.force);
  if (st == PF_OK && (opt.n || opt.p || opt.mu || opt.omega))
    st = pf_config_set_hypothesis(cfg, opt.n.value_or(0), opt.p.value_or(NAN),
                                  opt.mu.value_or(NAN), opt.omega.value_or(NAN));
  if (st != PF_OK) {
    pf_config_free(cfg);
    return fail(st);
  }

  pf_outcome* outcome = nullptr;
  st = pf_run(cfg, cmd, opt.trajectory.empty() ? nullptr : opt.trajectory.c_str(),
              &outcome);
  pf_config_free(cfg);
  if (st != PF_OK) return fail(st);

  const int code = pf_outcome_exit_code(outcome);
  std::fputs(pf_outcome_report(outcome), stdout);
  for (size_t i = 0; i < pf_outcome_file_count(outcome); ++i)
    std::fprintf(stderr, "wrote %s\n", pf_outcome_file(outcome, i));
  pf_outcome_free(outcome);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plateflow: thermoelastic plate solver and decay experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pf_version());

  Options opt;
  struct Entry {
    const char* name;
    pf_command cmd;
    const char* help;
  };
  const Entry entries[] = {
      {"simulate", PF_CMD_SIMULATE, "integrate in time and fit the decay rate"},
      {"picard", PF_CMD_PICARD, "solve by the frozen-coefficient fixed point"},
      {"spectrum", PF_CMD_SPECTRUM, "eigenvalues of M, s(A) and the ω window"},
      {"decay-fit", PF_CMD_DECAY_FIT, "fit decay rates (regression and envelope)"},
      {"check", PF_CMD_CHECK, "check the parameter hypotheses (exit 0 iff small-data holds)"},
      {"convergence", PF_CMD_CONVERGENCE, "h or N refinement study"},
  };
  pf_command chosen = PF_CMD_SIMULATE;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    auto* config = sub->add_option("--config", opt.config, "configuration file");
    if (e.cmd != PF_CMD_CHECK) config->required();
    sub->add_flag("--force", opt.force, "run even when a hypothesis fails");
    sub->add_option("--seed", opt.seed, "override initial.seed");
    sub->add_option("--out", opt.out, "override output.dir");
    if (e.cmd == PF_CMD_DECAY_FIT)
      sub->add_option("--trajectory", opt.trajectory,
                      "fit an existing trajectory CSV instead of simulating");
    if (e.cmd == PF_CMD_CHECK) {
      sub->add_option("--n", opt.n, "dimension");
      sub->add_option("--p", opt.p, "integrability p");
      sub->add_option("--mu", opt.mu, "time weight mu");
      sub->add_option("--omega", opt.omega, "decay rate omega");
    }
    sub->callback([&chosen, cmd = e.cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(chosen, opt);
}
