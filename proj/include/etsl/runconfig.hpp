#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "etsl/common.hpp"

namespace etsl {

// `key = value` run configuration.  Full-line '#' comments, one pair per
// line, duplicate keys rejected.  Later set() calls override parsed values.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        fail(Err::ConfigError,
             "line " + std::to_string(line_no) + ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty())
        fail(Err::ConfigError, "line " + std::to_string(line_no) + ": empty key");
      if (c.kv_.count(key))
        fail(Err::ConfigError, "duplicate key '" + key + "'");
      c.kv_[key] = value;
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  long get_int(const std::string& key, long fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
      fail(Err::ConfigError, key + ": '" + it->second + "' is not an integer");
    return v;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
      fail(Err::ConfigError, key + ": '" + it->second + "' is not a number");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    fail(Err::ConfigError, key + ": '" + it->second + "' is not a boolean");
  }

  // typo guard: every present key must be in the allowed set
  void check_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, _] : kv_)
      if (!allowed.count(k)) fail(Err::ConfigError, "unknown key '" + k + "'");
  }

  // canonical echo, sorted by key
  std::string resolved() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace etsl
