#pragma once

// Field-path aware reading of JSON configuration objects.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "diffsense/common.hpp"
#include "diffsense/errors.hpp"

namespace diffsense::detail {

using nlohmann::json;

// A JSON object being read, plus its dotted location for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

  double number(const std::string& key) const {
    if (!has(key)) throw ConfigError(field(key), "required field is missing");
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(field(key), "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(field(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  Complex complex(const std::string& key, Complex fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(field(key), "expected a number or [re, im]");
  }

  Node child(const std::string& key) const { return Node(j_.at(key), field(key)); }

  const json& array(const std::string& key) const {
    if (!j_.at(key).is_array()) throw ConfigError(field(key), "expected an array");
    return j_.at(key);
  }

 private:
  const json& j_;
  std::string path_;
};

template <typename Enum>
Enum parse_enum(const Node& n, const std::string& key, Enum fallback,
                std::initializer_list<std::pair<const char*, Enum>> names) {
  if (!n.has(key)) return fallback;
  const std::string s = n.text(key, "");
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(n.field(key), "unknown value \"" + s + "\" (expected one of " + allowed + ")");
}

template <typename Enum>
std::string enum_name(Enum value, std::initializer_list<std::pair<const char*, Enum>> names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "";
}

}  // namespace diffsense::detail
