#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcopt/errors.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

namespace detail {
inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}
}  // namespace detail

/// Flat "key = value" configuration with [section] headers and '#' comments.
/// Keys are addressed as "section.key"; CLI overrides reuse the same dotted
/// form. Values are plain strings until a typed getter interprets them.
class KvConfig {
 public:
  static KvConfig parse(std::istream& in) {
    KvConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string body = detail::trim(line);
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
        section = detail::trim(body.substr(1, body.size() - 2));
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = detail::trim(body.substr(0, eq));
      const std::string value = detail::trim(body.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  static KvConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingTrajectory("cannot open config file '" + path + "'");
    return parse(in);
  }

  void set(const std::string& dotted_key, const std::string& value) {
    values_[dotted_key] = value;
  }

  /// Applies a "section.key=value" override string.
  void set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like section.key=value: '" + assignment + "'");
    const std::string key = detail::trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("override has an empty key: '" + assignment + "'");
    values_[key] = detail::trim(assignment.substr(eq + 1));
  }

  std::optional<std::string> get(const std::string& dotted_key) const {
    const auto it = values_.find(dotted_key);
    if (it == values_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto v = get(key);
    return v ? *v : fallback;
  }

  long get_long(const std::string& key, long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stol(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: '" + *v + "'");
    }
  }

  double get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: '" + *v + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: '" + *v + "'");
  }

  Rational get_rational(const std::string& key, const Rational& fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
      return parse_rational(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a rational: '" + *v + "'");
    }
  }

  /// "inf" (or missing key) maps to an unbounded threshold.
  std::optional<Rational> get_threshold(const std::string& key) const {
    const auto v = get(key);
    if (!v || *v == "inf" || *v == "+inf" || *v == "infinity") return std::nullopt;
    try {
      return parse_rational(*v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a rational or 'inf': '" + *v + "'");
    }
  }

  std::vector<Rational> get_rational_list(const std::string& key,
                                          const std::vector<Rational>& fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<Rational> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = detail::trim(item);
      if (t.empty()) continue;
      try {
        out.push_back(parse_rational(t));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has a non-rational entry: '" + t + "'");
      }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' lists no values");
    return out;
  }

  /// Seed lists accept "0:19" ranges or comma-separated values.
  std::vector<std::uint64_t> get_seed_list(const std::string& key,
                                           const std::vector<std::uint64_t>& fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    return parse_seed_list(*v);
  }

  static std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      const long lo = std::stol(detail::trim(text.substr(0, colon)));
      const long hi = std::stol(detail::trim(text.substr(colon + 1)));
      if (lo < 0 || hi < lo) throw ConfigError("bad seed range '" + text + "'");
      for (long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
      return seeds;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = detail::trim(item);
      if (t.empty()) continue;
      seeds.push_back(static_cast<std::uint64_t>(std::stoull(t)));
    }
    if (seeds.empty()) throw ConfigError("seed list '" + text + "' is empty");
    return seeds;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace qcopt
