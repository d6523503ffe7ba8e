/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Flat sectioned key-value configuration (a TOML subset):
//
//   # comment
//   [section]
//   key = 1.5e-3
//   name = "text"
//   flag = true
//   list = [1, 2, 3]
//
// Keys are addressed as "section.key".  Arrays hold scalars only.  Every
// error is a ConfigError carrying the offending line and key.

#include <map>
#include <string>
#include <vector>

namespace plateflow {

struct ConfigValue {
  enum class Type { number, string, boolean, array };

  Type type = Type::number;
  double number = 0.0;
  std::string text;  // string payload
  bool flag = false;
  std::vector<ConfigValue> items;
  std::string raw;   // source text of the value, echoed into reports
  int line = 0;
};

class ConfigDocument {
public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::string& path);

  bool has(const std::string& key) const;
  /// Key/value source pairs in file order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  /// Line number of `key`, 0 if absent.
  int line_of(const std::string& key) const;
  /// Throws ConfigError on the first key that no accessor has read.
  void reject_unread() const;
  /// Overrides (or adds) a key; used for command-line flags.
  void set(const std::string& key, ConfigValue value);

private:
  const ConfigValue* find(const std::string& key) const;
  const ConfigValue& expect(const std::string& key, ConfigValue::Type type) const;

  std::map<std::string, ConfigValue> values_;
  std::vector<std::string> order_;
  mutable std::map<std::string, bool> read_;
};

}  // namespace plateflow
