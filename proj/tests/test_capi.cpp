/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "plateflow/plateflow.h"

namespace {

const char* kSmall = R"(
[grid]
n = 1
N = 16
[model]
phi = "cubic"
[hypothesis]
p = 2
mu = 0.9
[initial]
seed = 3
ratio = 0.5
amplitude = 1e-2
[solver]
h = 1e-2
T = 1
sample_every = 10
)";

}  // namespace

TEST(CApi, VersionAndErrorCodes) {
  ASSERT_NE(pf_version(), nullptr);
  EXPECT_GT(std::strlen(pf_version()), 0u);
  EXPECT_EQ(pf_exit_code(PF_OK), 0);
  EXPECT_EQ(pf_exit_code(PF_ERR_CONFIG), 2);
  EXPECT_EQ(pf_exit_code(PF_ERR_HYPOTHESIS), 3);
  EXPECT_EQ(pf_exit_code(PF_ERR_SOLVER), 4);
}

TEST(CApi, ConfigParseReportsErrors) {
  pf_config* cfg = nullptr;
  EXPECT_EQ(pf_config_parse("[grid]\nn = 3\n", &cfg), PF_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(pf_last_error()).find("grid.n"), std::string::npos);
  EXPECT_EQ(pf_config_load("/nonexistent.toml", &cfg), PF_ERR_CONFIG);
  EXPECT_EQ(pf_config_parse(nullptr, &cfg), PF_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(pf_config_default(&cfg), PF_OK);
  EXPECT_EQ(pf_config_set_seed(cfg, 99), PF_OK);
  EXPECT_EQ(pf_config_set_force(cfg, 1), PF_OK);
  EXPECT_EQ(pf_config_set_hypothesis(cfg, 2, 3.0, 1.0, 0.1), PF_OK);
  EXPECT_EQ(pf_config_set_hypothesis(cfg, 3, 3.0, 1.0, 0.1), PF_ERR_CONFIG);
  pf_config_free(cfg);
  pf_config_free(nullptr);
}

TEST(CApi, Eigenvalues) {
  const double m[9] = {0, 1, 0, -1, 0, 1, 0, -1, 1};
  double re[3], im[3];
  ASSERT_EQ(pf_eigenvalues(m, re, im), PF_OK);
  double min_re = 1e9;
  for (int j = 0; j < 3; ++j) min_re = std::min(min_re, re[j]);
  EXPECT_NEAR(min_re, 0.21508, 1e-5);

  const double bad[9] = {-1, 0, 0, 0, 1, 0, 0, 0, 1};
  EXPECT_EQ(pf_eigenvalues(bad, re, im), PF_ERR_NON_HURWITZ);
  // the roots are still reported
  EXPECT_NEAR(re[0], -1.0, 1e-12);
  EXPECT_EQ(pf_eigenvalues(nullptr, re, im), PF_ERR_INVALID_ARGUMENT);

  pf_config* cfg = nullptr;
  ASSERT_EQ(pf_config_parse("[grid]\nn = 2\n", &cfg), PF_OK);
  double s = 0, w = 0;
  ASSERT_EQ(pf_spectrum(cfg, re, im, &s, &w), PF_OK);
  EXPECT_NEAR(w, 2 * 0.21508, 1e-5);
  EXPECT_EQ(s, -w);
  pf_config_free(cfg);
}

TEST(CApi, CheckParams) {
  pf_hypotheses h;
  ASSERT_EQ(pf_check_params(2, 3.0, 1.0, 0.0, 1.0, &h), PF_OK);
  EXPECT_EQ(h.small_data, 1);
  ASSERT_EQ(pf_check_params(2, 2.0, 1.0, 0.0, 1.0, &h), PF_OK);
  EXPECT_EQ(h.small_data, 0);
  ASSERT_EQ(pf_check_params(1, 4.0, 0.9, 0.1, 1.0, &h), PF_OK);
  EXPECT_EQ(h.large_data, 1);
  EXPECT_EQ(h.omega_admissible, 1);
  EXPECT_NEAR(h.omega_max, 0.21508, 1e-5);
  EXPECT_EQ(pf_check_params(1, 4.0, 0.9, 0.1, 1.0, nullptr), PF_ERR_INVALID_ARGUMENT);
}

TEST(CApi, FitDecay) {
  std::vector<double> t, y;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    y.push_back(std::exp(1.0 - 0.3 * t.back()));
  }
  pf_decay_fit f;
  ASSERT_EQ(pf_fit_decay(t.data(), y.data(), t.size(), 0, 10, PF_FIT_REGRESSION, &f), PF_OK);
  EXPECT_NEAR(f.omega_fit, 0.3, 1e-10);
  EXPECT_NEAR(f.intercept, 1.0, 1e-10);
  EXPECT_EQ(f.points, 101u);
  EXPECT_EQ(pf_fit_decay(t.data(), y.data(), t.size(), 0, 0.5, PF_FIT_REGRESSION, &f), PF_ERR_FIT);
  EXPECT_FALSE(std::string(pf_last_error()).empty());
}

TEST(CApi, SimulateAndColumns) {
  pf_config* cfg = nullptr;
  ASSERT_EQ(pf_config_parse(kSmall, &cfg), PF_OK);
  pf_trajectory* tr = nullptr;
  ASSERT_EQ(pf_simulate(cfg, &tr), PF_OK);
  const size_t n = pf_trajectory_size(tr);
  EXPECT_EQ(n, 11u);
  EXPECT_EQ(pf_trajectory_status(tr), 0);
  std::vector<double> t(n), e(n), xp(n);
  ASSERT_EQ(pf_trajectory_column(tr, "t", t.data()), PF_OK);
  ASSERT_EQ(pf_trajectory_column(tr, "E", e.data()), PF_OK);
  ASSERT_EQ(pf_trajectory_column(tr, "norm_Xpmu", xp.data()), PF_OK);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_NEAR(t.back(), 1.0, 1e-12);
  EXPECT_NEAR(xp.front(), 1e-2, 1e-14);
  for (size_t i = 1; i < n; ++i) EXPECT_LE(e[i], e[i - 1]);
  EXPECT_EQ(pf_trajectory_column(tr, "bogus", t.data()), PF_ERR_INVALID_ARGUMENT);
  pf_trajectory_free(tr);

  ASSERT_EQ(pf_picard(cfg, &tr), PF_OK);
  EXPECT_GT(pf_trajectory_size(tr), 1u);
  pf_trajectory_free(tr);
  pf_config_free(cfg);
}

TEST(CApi, RunWritesProducts) {
  pf_config* cfg = nullptr;
  ASSERT_EQ(pf_config_parse(kSmall, &cfg), PF_OK);
  ASSERT_EQ(pf_config_set_output_dir(cfg, "capi_out/run"), PF_OK);
  pf_outcome* out = nullptr;
  ASSERT_EQ(pf_run(cfg, PF_CMD_SIMULATE, nullptr, &out), PF_OK);
  EXPECT_EQ(pf_outcome_exit_code(out), 0);
  EXPECT_NE(std::string(pf_outcome_report(out)).find("[spectrum]"), std::string::npos);
  ASSERT_GE(pf_outcome_file_count(out), 2u);
  EXPECT_NE(std::string(pf_outcome_file(out, 0)).find("trajectory.csv"), std::string::npos);
  EXPECT_EQ(pf_outcome_file(out, 99), nullptr);
  pf_outcome_free(out);

  ASSERT_EQ(pf_config_set_hypothesis(cfg, 2, 2.0, 1.0, 0.0), PF_OK);
  ASSERT_EQ(pf_run(cfg, PF_CMD_CHECK, nullptr, &out), PF_OK);
  EXPECT_EQ(pf_outcome_exit_code(out), 3);
  pf_outcome_free(out);
  pf_config_free(cfg);
}
