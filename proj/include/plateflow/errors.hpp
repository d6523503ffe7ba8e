/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plateflow {

enum class ErrorKind {
  invalid_argument,
  tag_mismatch,
  non_hurwitz,
  inadmissible_phi,
  inadmissible_params,
  blow_up,
  neumann_diverged,
  outer_diverged,
  non_positive_samples,
  window_too_small,
  config,
  hypothesis,
  io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Non-finite values or the overflow guard tripped while evaluating the
/// nonlinearity; `time()` is the time stamp of the offending state.
class BlowUp : public Error {
public:
  BlowUp(double t, const std::string& what)
      : Error(ErrorKind::blow_up, what), time_(t) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Raised by the fixed-point solvers; carries the contraction factor history
/// observed up to the point of failure.
class Diverged : public Error {
public:
  Diverged(ErrorKind kind, std::vector<double> factors, const std::string& what)
      : Error(kind, what), factors_(std::move(factors)) {}
  const std::vector<double>& factors() const noexcept { return factors_; }

private:
  std::vector<double> factors_;
};

class ConfigError : public Error {
public:
  ConfigError(int line, std::string key, const std::string& what)
      : Error(ErrorKind::config, format(line, key, what)),
        line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

private:
  static std::string format(int line, const std::string& key,
                            const std::string& what) {
    std::string out = "config";
    if (line > 0) out += ":" + std::to_string(line);
    if (!key.empty()) out += " [" + key + "]";
    return out + ": " + what;
  }
  int line_;
  std::string key_;
};

}  // namespace plateflow
