#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cfgtune/errors.hpp"

namespace cfgtune {

enum class Scale { linear, logarithmic };
enum class ValueType { integer, real };

inline std::string_view to_string(Scale s) { return s == Scale::linear ? "linear" : "log"; }
inline std::string_view to_string(ValueType t) { return t == ValueType::integer ? "integer" : "real"; }

/// One tunable dimension: bounds are inclusive and in concrete units.
struct ParameterDefinition {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  Scale scale = Scale::linear;
  ValueType type = ValueType::real;
  std::string unit;
  /// The framework's shipped value, used to measure the baseline.
  std::optional<double> default_value;

  /// Throws ValidationError naming the parameter if the definition is inconsistent.
  void validate() const {
    auto fail = [&](const std::string& why) {
      throw ValidationError("parameter '" + name + "': " + why);
    };
    if (name.empty()) throw ValidationError("parameter with empty name");
    if (!std::isfinite(min) || !std::isfinite(max)) fail("bounds must be finite");
    if (!(min < max)) fail("min must be strictly less than max");
    if (scale == Scale::logarithmic && !(min > 0.0)) fail("logarithmic scale requires min > 0");
    if (type == ValueType::integer && (std::floor(min) != min || std::floor(max) != max)) {
      fail("integer parameter requires integral bounds");
    }
    if (default_value) {
      if (!(*default_value >= min && *default_value <= max)) fail("default value outside [min, max]");
      if (type == ValueType::integer && std::floor(*default_value) != *default_value) {
        fail("integer parameter requires an integral default");
      }
    }
  }

  friend bool operator==(const ParameterDefinition&, const ParameterDefinition&) = default;
};

/// A point of the unit hypercube; one coordinate per parameter.
struct NormalizedConfig {
  std::vector<double> coords;

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const NormalizedConfig&, const NormalizedConfig&) = default;
};

/// Parameter values in concrete units, in the order of the owning space.
struct ConcreteConfig {
  std::vector<std::pair<std::string, double>> values;

  const double* find(std::string_view name) const {
    for (const auto& [key, value] : values) {
      if (key == name) return &value;
    }
    return nullptr;
  }

  double at(std::string_view name) const {
    if (const double* v = find(name)) return *v;
    throw ValidationError("configuration has no parameter '" + std::string(name) + "'");
  }

  friend bool operator==(const ConcreteConfig&, const ConcreteConfig&) = default;
};

class ParameterSpace {
 public:
  ParameterSpace() = default;

  explicit ParameterSpace(std::vector<ParameterDefinition> parameters) : parameters_(std::move(parameters)) {
    if (parameters_.empty()) throw ValidationError("parameter space must contain at least one parameter");
    std::unordered_set<std::string> seen;
    for (const auto& p : parameters_) {
      p.validate();
      if (!seen.insert(p.name).second) throw ValidationError("duplicate parameter name '" + p.name + "'");
    }
  }

  std::size_t dimension() const { return parameters_.size(); }
  const std::vector<ParameterDefinition>& parameters() const { return parameters_; }
  const ParameterDefinition& operator[](std::size_t i) const { return parameters_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < parameters_.size(); ++i) {
      if (parameters_[i].name == name) return i;
    }
    return std::nullopt;
  }

  bool has_defaults() const {
    return std::all_of(parameters_.begin(), parameters_.end(),
                       [](const ParameterDefinition& p) { return p.default_value.has_value(); });
  }

  ConcreteConfig default_config() const {
    ConcreteConfig c;
    for (const auto& p : parameters_) {
      if (!p.default_value) throw ValidationError("parameter '" + p.name + "' has no default value");
      c.values.emplace_back(p.name, *p.default_value);
    }
    return c;
  }

  friend bool operator==(const ParameterSpace&, const ParameterSpace&) = default;

 private:
  std::vector<ParameterDefinition> parameters_;
};

/// Maps one normalized coordinate to its concrete value (rounded half-up and
/// clamped for integer parameters).
inline double map_coordinate(const ParameterDefinition& p, double u) {
  double v = p.scale == Scale::linear ? p.min + u * (p.max - p.min) : p.min * std::pow(p.max / p.min, u);
  if (p.type == ValueType::integer) v = std::floor(v + 0.5);
  return std::clamp(v, p.min, p.max);
}

inline double unmap_coordinate(const ParameterDefinition& p, double v) {
  if (!(v >= p.min && v <= p.max)) {
    throw ValidationError("parameter '" + p.name + "': value outside [min, max]");
  }
  double u = p.scale == Scale::linear ? (v - p.min) / (p.max - p.min) : std::log(v / p.min) / std::log(p.max / p.min);
  return std::clamp(u, 0.0, 1.0);
}

inline void check_normalized(const ParameterSpace& space, const NormalizedConfig& u) {
  if (u.size() != space.dimension()) {
    throw ContractViolation("normalized configuration has " + std::to_string(u.size()) +
                            " coordinates, space has dimension " + std::to_string(space.dimension()));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
      throw ContractViolation("coordinate for '" + space[i].name + "' outside [0, 1]");
    }
  }
}

inline ConcreteConfig map_to_concrete(const ParameterSpace& space, const NormalizedConfig& u) {
  check_normalized(space, u);
  ConcreteConfig c;
  c.values.reserve(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    c.values.emplace_back(space[i].name, map_coordinate(space[i], u[i]));
  }
  return c;
}

inline NormalizedConfig map_to_normalized(const ParameterSpace& space, const ConcreteConfig& c) {
  NormalizedConfig u;
  u.coords.reserve(space.dimension());
  for (const auto& p : space.parameters()) {
    const double* v = c.find(p.name);
    if (!v) throw ValidationError("parameter '" + p.name + "': missing from configuration");
    u.coords.push_back(unmap_coordinate(p, *v));
  }
  if (c.values.size() != space.dimension()) {
    throw ValidationError("configuration has parameters not present in the space");
  }
  return u;
}

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest text that parses back to the same double ("5000", "0.25", "1e+20").
/// Integral values below 1e15 are always written without an exponent.
inline std::string format_number(double v) {
  char buf[64];
  const bool plain = std::floor(v) == v && std::fabs(v) < 1e15;
  auto [end, ec] = plain ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ContractViolation("format_number: conversion failed");
  return std::string(buf, end);
}

inline std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

namespace detail {

inline std::string group_thousands(long long v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(' ');
    out.push_back(digits[i]);
  }
  return v < 0 ? "-" + out : out;
}

inline std::string scaled(double v, const char* const* suffixes, std::size_t count, const char* sep) {
  std::size_t k = 0;
  while (k + 1 < count && std::fabs(v) >= 999.95) {
    v /= 1000.0;
    ++k;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%s%s", v, sep, suffixes[k]);
  return buf;
}

}  // namespace detail

/// Human-readable value in report style: "179.4 KB", "2.9 M", "5 258", "73 B".
/// Decimal (powers of 1000) suffixes; units other than bytes and counts print
/// as grouped integers or plain decimals.
inline std::string format_quantity(double v, std::string_view unit) {
  if (!std::isfinite(v)) return "n/a";
  const bool integral = std::floor(v) == v;
  if (unit == "bytes") {
    if (std::fabs(v) < 1000.0) {
      return (integral ? std::to_string(static_cast<long long>(v)) : format_number(v)) + " B";
    }
    static const char* const byte_suffixes[] = {"B", "KB", "MB", "GB", "TB", "PB"};
    return detail::scaled(v, byte_suffixes, 6, " ");
  }
  if (unit == "records" || unit == "count" || unit == "records/s") {
    if (std::fabs(v) < 10000.0) {
      if (integral) return detail::group_thousands(static_cast<long long>(v));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f", v);
      return buf;
    }
    static const char* const count_suffixes[] = {"", "K", "M", "G", "T"};
    return detail::scaled(v, count_suffixes, 5, " ");
  }
  if (integral && std::fabs(v) < 1e15) return detail::group_thousands(static_cast<long long>(v));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Parameter-spec file
//
//   # comment (also allowed after a value)
//   [parameter]
//   name    = producer.batch.size
//   min     = 1
//   max     = 1048576
//   scale   = log          # linear | log
//   type    = integer      # integer | real
//   unit    = bytes        # optional free text
//   default = 16384        # optional
//
// One [parameter] block per dimension, in search-space order.

inline ParameterSpace parse_space(std::string_view text, const std::string& source = "<string>") {
  std::vector<ParameterDefinition> params;
  struct Pending {
    ParameterDefinition def;
    std::size_t line = 0;
    bool has_name = false, has_min = false, has_max = false, has_scale = false, has_type = false;
  };
  std::optional<Pending> cur;

  auto fail = [&](std::size_t line, const std::string& why) -> void {
    throw ValidationError(source + ":" + std::to_string(line) + ": " + why);
  };
  auto finish = [&]() {
    if (!cur) return;
    const char* missing = !cur->has_name ? "name" : !cur->has_min ? "min" : !cur->has_max ? "max"
                        : !cur->has_scale ? "scale" : !cur->has_type ? "type" : nullptr;
    if (missing) fail(cur->line, std::string("[parameter] block is missing '") + missing + "'");
    try {
      cur->def.validate();
    } catch (const ValidationError& e) {
      fail(cur->line, e.what());
    }
    params.push_back(std::move(cur->def));
    cur.reset();
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line != "[parameter]") fail(line_no, "unknown section '" + std::string(line) + "'");
      finish();
      cur.emplace();
      cur->line = line_no;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (!cur) fail(line_no, "field outside of a [parameter] block");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");

    auto number = [&]() {
      auto v = parse_number(value);
      if (!v) fail(line_no, "'" + key + "' expects a number, got '" + std::string(value) + "'");
      return *v;
    };
    if (key == "name") {
      cur->def.name = std::string(value);
      cur->has_name = true;
    } else if (key == "min") {
      cur->def.min = number();
      cur->has_min = true;
    } else if (key == "max") {
      cur->def.max = number();
      cur->has_max = true;
    } else if (key == "scale") {
      if (value == "linear") cur->def.scale = Scale::linear;
      else if (value == "log" || value == "logarithmic") cur->def.scale = Scale::logarithmic;
      else fail(line_no, "scale must be 'linear' or 'log'");
      cur->has_scale = true;
    } else if (key == "type") {
      if (value == "integer") cur->def.type = ValueType::integer;
      else if (value == "real") cur->def.type = ValueType::real;
      else fail(line_no, "type must be 'integer' or 'real'");
      cur->has_type = true;
    } else if (key == "unit") {
      cur->def.unit = std::string(value);
    } else if (key == "default") {
      cur->def.default_value = number();
    } else {
      fail(line_no, "unknown field '" + key + "'");
    }
    if (end == text.size()) break;
  }
  finish();
  if (params.empty()) throw ValidationError(source + ": no [parameter] blocks found");
  return ParameterSpace(std::move(params));
}

inline ParameterSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open parameter-spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_space(buf.str(), path);
}

inline std::string write_space(const ParameterSpace& space) {
  std::string out;
  for (const auto& p : space.parameters()) {
    if (!out.empty()) out += "\n";
    out += "[parameter]\n";
    out += "name    = " + p.name + "\n";
    out += "min     = " + format_number(p.min) + "\n";
    out += "max     = " + format_number(p.max) + "\n";
    out += "scale   = " + std::string(to_string(p.scale)) + "\n";
    out += "type    = " + std::string(to_string(p.type)) + "\n";
    if (!p.unit.empty()) out += "unit    = " + p.unit + "\n";
    if (p.default_value) out += "default = " + format_number(*p.default_value) + "\n";
  }
  return out;
}

}  // namespace cfgtune
