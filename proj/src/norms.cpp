/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "plateflow/errors.hpp"

namespace plateflow {

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0))
    throw Error(ErrorKind::invalid_argument, "lp_norm requires p >= 1");
  double sum = 0.0;
  if (p == 2.0 && f.is_spectral()) {
    // discrete Parseval, no transform needed
    for (double c : f.values()) sum += c * c;
    return std::sqrt(f.grid().parseval_factor() * sum);
  }
  const ScalarField nodes = f.is_spectral() ? dst_inverse(f) : f;
  if (std::isinf(p)) return nodes.max_abs();
  if (p == 2.0) {
    for (double v : nodes.values()) sum += v * v;
    return std::sqrt(f.grid().cell_volume() * sum);
  }
  for (double v : nodes.values()) sum += std::pow(std::abs(v), p);
  return std::pow(f.grid().cell_volume() * sum, 1.0 / p);
}

double sobolev_norm(const ScalarField& f, double s, double p) {
  require(f, Representation::spectral, "sobolev_norm");
  if (!(s >= 0.0))
    throw Error(ErrorKind::invalid_argument, "sobolev_norm requires s >= 0");
  ScalarField weighted = f;
  for (std::size_t i = 0; i < weighted.size(); ++i)
    weighted[i] *= std::pow(1.0 + f.grid().eigenvalue(i), 0.5 * s);
  return lp_norm(weighted, p);
}

double trace_smoothness(double p, double mu) {
  if (!(p > 1.0) || !(mu * p > 1.0) || !(mu <= 1.0)) {
    std::ostringstream os;
    os << "trace space needs p > 1 and mu in (1/p, 1]; got p=" << p
       << " mu=" << mu;
    throw Error(ErrorKind::inadmissible_params, os.str());
  }
  return 2.0 * (mu - 1.0 / p);
}

double state_norm(const SpectralState& x, const NormSpec& kind,
                  const HypothesisParams& params) {
  const double p = params.p;
  double s = 0.0;
  switch (kind.kind) {
    case NormKind::lp: s = 0.0; break;
    case NormKind::sobolev: s = kind.s; break;
    case NormKind::trace_pmu: s = trace_smoothness(p, params.mu); break;
    case NormKind::trace_p: s = trace_smoothness(p, 1.0); break;
  }
  std::array<double, 3> parts{};
  for (int c = 0; c < 3; ++c)
    parts[c] = kind.kind == NormKind::lp ? lp_norm(x.component(c), p)
                                         : sobolev_norm(x.component(c), s, p);
  double total;
  if (std::isinf(p)) {
    total = std::max({parts[0], parts[1], parts[2]});
  } else if (p == 2.0) {
    total = std::sqrt(parts[0] * parts[0] + parts[1] * parts[1] +
                      parts[2] * parts[2]);
  } else {
    total = std::pow(std::pow(parts[0], p) + std::pow(parts[1], p) +
                         std::pow(parts[2], p),
                     1.0 / p);
  }
  if (kind.shifted) total *= std::exp(params.omega * x.t);
  return total;
}

double weighted_time_norm(const std::vector<double>& t,
                          const std::vector<double>& norms, double mu, double p,
                          double omega) {
  if (t.size() != norms.size() || t.size() < 2)
    throw Error(ErrorKind::invalid_argument,
                "weighted_time_norm needs >= 2 matching samples");
  if (!(p >= 1.0) || std::isinf(p))
    throw Error(ErrorKind::invalid_argument,
                "weighted_time_norm needs finite p >= 1");
  auto integrand = [&](std::size_t i) {
    if (mu < 1.0 && t[i] <= 0.0) return 0.0;
    return std::exp(omega * p * t[i]) * std::pow(t[i], (1.0 - mu) * p) *
           std::pow(norms[i], p);
  };
  double sum = 0.0;
  double prev = integrand(0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double cur = integrand(i);
    sum += 0.5 * (t[i] - t[i - 1]) * (prev + cur);
    prev = cur;
  }
  return std::pow(sum, 1.0 / p);
}

double weighted_time_norm(const Trajectory& traj, double mu, double p,
                          double omega, const NormSpec& space,
                          const HypothesisParams& params) {
  std::vector<double> t, norms;
  t.reserve(traj.size());
  norms.reserve(traj.size());
  NormSpec unshifted = space;
  unshifted.shifted = false;
  for (const auto& s : traj.samples()) {
    t.push_back(s.t);
    norms.push_back(state_norm(s.state, unshifted, params));
  }
  return weighted_time_norm(t, norms, mu, p, omega);
}

// ---------------------------------------------------------------------------

std::string HypothesisReport::small_data_failure() const {
  for (const auto& pr : predicates)
    if (!pr.pass && pr.name.rfind("small-data", 0) == 0)
      return pr.name + " (" + pr.detail + ")";
  return {};
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "parameters: n=%d p=%g mu=%g omega=%g a=%g\n",
                params.n, params.p, params.mu, params.omega, params.a);
  os << buf;
  std::size_t width = 0;
  for (const auto& pr : predicates) width = std::max(width, pr.name.size());
  for (const auto& pr : predicates) {
    os << "  " << pr.name << std::string(width - pr.name.size() + 2, ' ')
       << (pr.pass ? "PASS" : "FAIL") << "  " << pr.detail << "\n";
  }
  std::snprintf(buf, sizeof buf,
                "ω window: [0, %.6f)  (s(A) = %.6f)\n", omega_max,
                spectral_bound);
  os << buf;
  os << "trace space: " << trace_space << "\n";
  os << "small-data regime: " << (small_data ? "PASS" : "FAIL") << "\n";
  os << "large-data short-time regime: " << (large_data ? "PASS" : "FAIL")
     << "\n";
  return os.str();
}

HypothesisReport check_hypotheses(const HypothesisParams& params,
                                  const CouplingMatrix& coupling) {
  HypothesisReport r;
  r.params = params;
  const double n = params.n;
  const double p = params.p;
  const double mu = params.mu;
  const bool finite = std::isfinite(p) && std::isfinite(mu);
  char buf[160];

  auto add = [&](std::string name, bool pass, std::string detail) {
    r.predicates.push_back({std::move(name), pass, std::move(detail)});
    return pass;
  };

  const bool dim_ok = add("dimension n >= 1", params.n >= 1,
                          "n = " + std::to_string(params.n));
  std::snprintf(buf, sizeof buf, "p = %g", p);
  const bool p_ok = add("p in (1, inf)", finite && p > 1.0, buf);
  std::snprintf(buf, sizeof buf, "mu*p = %g", mu * p);
  const bool mu_ok =
      add("mu in (1/p, 1]", finite && mu * p > 1.0 && mu <= 1.0, buf);

  // Cross-multiplied so the boundary cases compare exactly.
  std::snprintf(buf, sizeof buf, "need p > %g", 1.0 + n / 2.0);
  const bool s1 = add("small-data: p > 1 + n/2",
                      dim_ok && finite && 2.0 * p > 2.0 + n, buf);
  std::snprintf(buf, sizeof buf, "need mu > %g", (n + 2.0) / (2.0 * p));
  const bool s2 = add("small-data: mu in ((n+2)/(2p), 1]",
                      dim_ok && finite && 2.0 * p * mu > n + 2.0 && mu <= 1.0,
                      buf);
  std::snprintf(buf, sizeof buf, "need p > %g", (n + 4.0) / 2.0);
  const bool l1 = add("large-data: p > (n+4)/2",
                      dim_ok && finite && 2.0 * p > n + 4.0, buf);
  std::snprintf(buf, sizeof buf, "need mu > %g",
                (n + 4.0) / (4.0 * p) + 0.5);
  const bool l2 = add("large-data: mu in ((n+4)/(4p) + 1/2, 1]",
                      dim_ok && finite && 4.0 * p * mu > n + 4.0 + 2.0 * p &&
                          mu <= 1.0,
                      buf);

  r.spectral_bound = -std::max(params.n, 1) * coupling.min_real_part();
  r.omega_max = -r.spectral_bound;
  std::snprintf(buf, sizeof buf, "omega = %g, window [0, %.6f)", params.omega,
                r.omega_max);
  r.omega_admissible = add("omega in [0, -s(A))",
                           params.omega >= 0.0 && params.omega < r.omega_max,
                           buf);
  std::snprintf(buf, sizeof buf, "a = %g", params.a);
  add("a > 0", params.a > 0.0, buf);

  r.small_data = p_ok && mu_ok && s1 && s2;
  r.large_data = p_ok && mu_ok && l1 && l2;

  if (!(p_ok && mu_ok)) {
    r.trace_space = "undefined (needs p > 1, mu in (1/p, 1])";
  } else {
    std::snprintf(buf, sizeof buf, "W_p^%g", 2.0 * (mu - 1.0 / p));
    const double twice = 2.0 * mu * p;
    if (twice < 3.0) {
      r.trace_space = std::string(buf) + " (mu p < 3/2, no boundary trace)";
    } else if (twice > 3.0) {
      r.trace_space = std::string(buf) +
                      " with u = 0 on the boundary (mu p > 3/2; the sine "
                      "basis satisfies it identically)";
    } else {
      r.trace_boundary_case = true;
      r.trace_space = std::string(buf) +
                      " (boundary case mu p = 3/2, no space assigned)";
    }
  }
  return r;
}

}  // namespace plateflow
