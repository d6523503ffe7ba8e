/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "plateflow/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      return false;
  return true;
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ValueParser {
public:
  ValueParser(std::string text, int line, std::string key)
      : s_(std::move(text)), line_(line), key_(std::move(key)) {}

  ConfigValue parse_top() {
    ConfigValue v = parse_value(true);
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    v.raw = s_;
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(line_, key_, msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  ConfigValue parse_value(bool allow_array) {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    ConfigValue v;
    v.line = line_;
    const char c = s_[pos_];
    if (c == '[') {
      if (!allow_array) fail("nested arrays are not supported");
      ++pos_;
      v.type = ConfigValue::Type::array;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value(false));
        skip_ws();
        if (pos_ >= s_.size()) fail("unterminated array");
        if (s_[pos_] == ',') {
          ++pos_;
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
          }
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '"') {
      ++pos_;
      v.type = ConfigValue::Type::string;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated string");
        const char d = s_[pos_++];
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= s_.size()) fail("unterminated escape");
          const char e = s_[pos_++];
          switch (e) {
            case 'n': v.text += '\n'; break;
            case 't': v.text += '\t'; break;
            case '"': v.text += '"'; break;
            case '\\': v.text += '\\'; break;
            default: fail(std::string("unknown escape \\") + e);
          }
        } else {
          v.text += d;
        }
      }
      return v;
    }
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[end])))
      ++end;
    const std::string token = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true" || token == "false") {
      v.type = ConfigValue::Type::boolean;
      v.flag = token == "true";
      return v;
    }
    v.type = ConfigValue::Type::number;
    if (token == "inf" || token == "+inf") {
      v.number = HUGE_VAL;
      return v;
    }
    if (token == "-inf") {
      v.number = -HUGE_VAL;
      return v;
    }
    std::string cleaned;
    for (char d : token)
      if (d != '_') cleaned += d;
    char* stop = nullptr;
    errno = 0;
    v.number = std::strtod(cleaned.c_str(), &stop);
    if (cleaned.empty() || stop != cleaned.c_str() + cleaned.size() ||
        errno == ERANGE || !std::isfinite(v.number))
      fail("cannot parse value '" + token + "'");
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
  int line_;
  std::string key_;
};

const char* type_name(ConfigValue::Type t) {
  switch (t) {
    case ConfigValue::Type::number: return "a number";
    case ConfigValue::Type::string: return "a string";
    case ConfigValue::Type::boolean: return "a boolean";
    case ConfigValue::Type::array: return "an array";
  }
  return "?";
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError(lineno, "", "malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section))
        throw ConfigError(lineno, section, "invalid section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "", "expected 'key = value'");
    const std::string name = trim(body.substr(0, eq));
    if (!valid_name(name)) throw ConfigError(lineno, name, "invalid key name");
    const std::string key = section.empty() ? name : section + "." + name;
    if (doc.values_.count(key))
      throw ConfigError(lineno, key, "duplicate key");
    ValueParser parser(trim(body.substr(eq + 1)), lineno, key);
    doc.values_[key] = parser.parse_top();
    doc.order_.push_back(key);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ConfigDocument::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::vector<std::pair<std::string, std::string>> ConfigDocument::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : order_) out.emplace_back(k, values_.at(k).raw);
  return out;
}

const ConfigValue* ConfigDocument::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  read_[key] = true;
  return &it->second;
}

const ConfigValue& ConfigDocument::expect(const std::string& key,
                                          ConfigValue::Type type) const {
  const ConfigValue* v = find(key);
  if (!v) throw ConfigError(0, key, "missing required key");
  if (v->type != type)
    throw ConfigError(v->line, key, std::string("expected ") + type_name(type));
  return *v;
}

double ConfigDocument::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

double ConfigDocument::number(const std::string& key) const {
  return expect(key, ConfigValue::Type::number).number;
}

long long ConfigDocument::integer(const std::string& key,
                                  long long fallback) const {
  if (!has(key)) return fallback;
  const ConfigValue& v = expect(key, ConfigValue::Type::number);
  if (v.number != std::floor(v.number) || std::abs(v.number) > 9.0e15)
    throw ConfigError(v.line, key, "expected an integer");
  return static_cast<long long>(v.number);
}

std::string ConfigDocument::string(const std::string& key,
                                   const std::string& fallback) const {
  return has(key) ? expect(key, ConfigValue::Type::string).text : fallback;
}

bool ConfigDocument::boolean(const std::string& key, bool fallback) const {
  return has(key) ? expect(key, ConfigValue::Type::boolean).flag : fallback;
}

std::vector<double> ConfigDocument::numbers(const std::string& key) const {
  const ConfigValue& v = expect(key, ConfigValue::Type::array);
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.type != ConfigValue::Type::number)
      throw ConfigError(v.line, key, "expected an array of numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<std::string> ConfigDocument::strings(const std::string& key) const {
  const ConfigValue& v = expect(key, ConfigValue::Type::array);
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.type != ConfigValue::Type::string)
      throw ConfigError(v.line, key, "expected an array of strings");
    out.push_back(item.text);
  }
  return out;
}

int ConfigDocument::line_of(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? 0 : it->second.line;
}

void ConfigDocument::reject_unread() const {
  for (const auto& k : order_)
    if (!read_.count(k)) throw ConfigError(values_.at(k).line, k, "unknown key");
}

void ConfigDocument::set(const std::string& key, ConfigValue value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = std::move(value);
}

}  // namespace plateflow
