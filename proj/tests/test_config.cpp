/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "plateflow/config.hpp"
#include "plateflow/errors.hpp"
#include "plateflow/experiment.hpp"

using namespace plateflow;

namespace {

// Expects parse_experiment (or the document parser) to fail on `line` / `key`.
void expect_error(const std::string& text, int line, const std::string& key,
                  const std::string& fragment = {}) {
  try {
    parse_experiment(ConfigDocument::parse(text));
    FAIL() << "expected a ConfigError for:\n" << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.key(), key) << e.what();
    if (!fragment.empty()) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  }
}

}  // namespace

TEST(ConfigDocument, ScalarsArraysAndComments) {
  auto doc = ConfigDocument::parse(
      "\xEF\xBB\xBF# leading comment\n"
      "top = 3\n"
      "[a]\n"
      "x = 1.5e-3   # trailing\n"
      "name = \"with # hash\"\n"
      "flag = true\n"
      "big = 1_000_000\n"
      "list = [1, 2.5, -3,]\n"
      "words = [\"p\", \"q\"]\n"
      "esc = \"tab\\there\"\n");
  EXPECT_EQ(doc.integer("top", 0), 3);
  EXPECT_DOUBLE_EQ(doc.number("a.x"), 1.5e-3);
  EXPECT_EQ(doc.string("a.name", ""), "with # hash");
  EXPECT_TRUE(doc.boolean("a.flag", false));
  EXPECT_EQ(doc.integer("a.big", 0), 1000000);
  EXPECT_EQ(doc.numbers("a.list"), (std::vector<double>{1, 2.5, -3}));
  EXPECT_EQ(doc.strings("a.words"), (std::vector<std::string>{"p", "q"}));
  EXPECT_EQ(doc.string("a.esc", ""), "tab\there");
  EXPECT_EQ(doc.line_of("a.flag"), 6);
  EXPECT_EQ(doc.number("missing", 7.0), 7.0);
  EXPECT_NO_THROW(doc.reject_unread());
  const auto entries = doc.entries();
  ASSERT_EQ(entries.size(), 8u);
  EXPECT_EQ(entries[1].first, "a.x");
  EXPECT_EQ(entries[1].second, "1.5e-3");
}

TEST(ConfigDocument, SyntaxErrorsCarryLines) {
  const std::pair<const char*, int> cases[] = {
      {"[grid]\nn = \n", 2},
      {"[grid\nn = 1\n", 1},
      {"[grid]\nn 1\n", 2},
      {"x = 1\nx = 2\n", 2},
      {"x = \"open\n", 1},
      {"x = [1, [2]]\n", 1},
      {"x = 1e999\n", 1},
      {"x = 1 2\n", 1},
      {"bad key = 1\n", 1},
  };
  for (const auto& [text, line] : cases) {
    try {
      ConfigDocument::parse(text);
      FAIL() << "expected failure for: " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), line) << text << " -> " << e.what();
    }
  }
}

TEST(ConfigDocument, TypeMismatchAndUnknownKeys) {
  auto doc = ConfigDocument::parse("[s]\nx = \"text\"\ny = 1.5\nz = 1\n");
  EXPECT_THROW(doc.number("s.x"), ConfigError);
  EXPECT_THROW(doc.integer("s.y", 0), ConfigError);
  try {
    doc.reject_unread();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "s.z");
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(ConfigDocument::load("/nonexistent/plateflow.toml"), ConfigError);
}

TEST(ExperimentConfig, Defaults) {
  auto cfg = parse_experiment(ConfigDocument::parse(""));
  EXPECT_EQ(cfg.n, 1);
  EXPECT_EQ(cfg.N, 64);
  EXPECT_EQ(cfg.phi.kind(), PhiKind::cubic);
  EXPECT_EQ(cfg.stepper.method, Method::etdrk2);
  EXPECT_FALSE(cfg.fit.enabled);
  EXPECT_FALSE(cfg.force);
}

TEST(ExperimentConfig, FullFile) {
  auto cfg = parse_experiment(ConfigDocument::parse(R"(
[grid]
n = 2
N = 16
[model]
phi = "odd_power"
phi_power = 5
a = 0.5
coupling = [1, 0, 0, 0, 2, 0, 0, 0, 3]
[hypothesis]
p = 3
mu = 1
omega = 0.2
[initial]
family = "modes"
variables = "w"
modes = ["f 1 2 0.5", "h 3 1 -0.25"]
[solver]
method = "exp_euler"
h = 0.01
T = 2
sample_every = 5
max_outer = 7
[fit]
t_lo = 0.5
t_hi = 2
method = "regression"
norm = "xp"
sigmas = [0.1, 1]
[probe]
amplitudes = [0, 0.01, 0.1]
[output]
dir = "somewhere"
snapshots = true
)"));
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.phi.exponent(), 5);
  EXPECT_EQ(cfg.coupling.matrix()[4], 2.0);
  EXPECT_EQ(cfg.params.p, 3.0);
  EXPECT_EQ(cfg.params.a, 0.5);
  ASSERT_EQ(cfg.initial.modes.size(), 2u);
  EXPECT_EQ(cfg.initial.modes[1].component, 2);
  EXPECT_EQ(cfg.initial.modes[1].k1, 3);
  EXPECT_EQ(cfg.initial.modes[1].k2, 1);
  EXPECT_EQ(cfg.initial.variables, InitialVariables::w);
  EXPECT_EQ(cfg.stepper.method, Method::exp_euler);
  EXPECT_EQ(cfg.picard.max_outer, 7);
  EXPECT_EQ(cfg.picard.h, 0.01);
  EXPECT_TRUE(cfg.fit.enabled);
  EXPECT_EQ(cfg.fit.method, FitMethod::regression);
  EXPECT_EQ(cfg.fit.sigmas.size(), 2u);
  EXPECT_EQ(cfg.probe_amplitudes.size(), 3u);
  EXPECT_TRUE(cfg.snapshots);
  EXPECT_EQ(cfg.out_dir, "somewhere");
  EXPECT_FALSE(cfg.echo.empty());
}

TEST(ExperimentConfig, SemanticErrorsNameLineAndKey) {
  expect_error("[grid]\nn = 3\n", 2, "grid.n");
  expect_error("[grid]\nN = 2\n", 2, "grid.N");
  expect_error("[grid]\nn = 1.5\n", 2, "grid.n", "integer");
  expect_error("[model]\nphi = \"quartic\"\n", 2, "model.phi", "unknown nonlinearity");
  expect_error("[model]\ncoupling = [1, 2, 3]\n", 2, "model.coupling");
  expect_error("[model]\ncoupling = [-1, 0, 0, 0, 1, 0, 0, 0, 1]\n", 2, "model.coupling");
  expect_error("\n[solver]\nh = 0.3\nT = 1\n", 3, "solver.h");
  expect_error("[solver]\nmethod = \"rk4\"\n", 2, "solver.method");
  expect_error("[solver]\nstep = 1e-3\n", 2, "solver.step", "unknown key");
  expect_error("[initial]\nratio = 1.5\n", 2, "initial.ratio");
  expect_error("[initial]\nfamily = \"modes\"\n", 0, "initial.modes");
  expect_error("[initial]\nmodes = [\"Q 1 0.5\"]\n", 2, "initial.modes");
  expect_error("[initial]\nmodes = [\"Z 99 0.5\"]\n", 2, "initial.modes", "not on the grid");
  expect_error("[solver]\nT = 1\n[fit]\nt_lo = 0.5\nt_hi = 2\n", 5, "fit.t_hi");
  expect_error("[fit]\nt_lo = 0.5\nt_hi = 0.2\n", 2, "fit.t_lo");
  expect_error("[probe]\namplitudes = [0.1, 0.01]\n", 2, "probe.amplitudes");
  expect_error("[convergence]\nlevels = 1\n", 2, "convergence.levels");
  expect_error("[output]\nsnapshots = 1\n", 2, "output.snapshots", "boolean");
}

TEST(ExperimentConfig, ShippedConfigsParse) {
  for (const char* name : {"linear_decay", "small_data", "picard_short", "convergence_h",
                           "convergence_N", "plate_2d", "refused_2d"}) {
    const std::string path = std::string(PLATEFLOW_CONFIG_DIR) + "/" + name + ".toml";
    EXPECT_NO_THROW(load_experiment(path)) << path;
  }
}
