#pragma once

// YAML run configuration with line-numbered diagnostics.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "rinorm/measure_space.hpp"
#include "rinorm/ri_norms.hpp"
#include "rinorm/gain.hpp"

namespace rinorm::app {

/// Malformed configuration: bad syntax, missing or unknown keys, values out of
/// range, registry names that do not resolve.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A YAML node plus its dotted key path.
class Cfg {
 public:
  Cfg(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  static Cfg load_file(const std::filesystem::path& file);
  static Cfg load_string(const std::string& text, const std::string& origin = "<string>");

  const std::string& path() const { return path_; }
  int line() const { return node_.Mark().line + 1; }
  [[noreturn]] void fail(const std::string& what) const;

  bool has(const std::string& key) const;
  Cfg at(const std::string& key) const;
  std::optional<Cfg> get(const std::string& key) const;
  void allow_only(std::initializer_list<std::string_view> keys) const;

  bool is_map() const { return node_.IsMap(); }
  bool is_sequence() const { return node_.IsSequence(); }
  bool is_scalar() const { return node_.IsScalar(); }

  double number() const;
  std::int64_t integer() const;
  std::string str() const;
  bool boolean() const;
  std::vector<Cfg> items() const;
  std::vector<double> numbers() const;

  double number_or(const std::string& key, double fallback) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  YAML::Node node_;
  std::string path_;
};

MetricMeasureSpace load_space(const Cfg& c);
RISpace load_spec(const Cfg& c);
GainFunction load_gain(const Cfg& c, const RISpace* x = nullptr, const RISpace* y = nullptr);
FundamentalFunction load_phi(const Cfg& c);
Ball load_ball(const Cfg& c, const MetricMeasureSpace& space);

/// Point function: `values: [...]` or `generator: coordinate | distance(i) |
/// random(lo,hi)`; random draws use `seed`.
std::vector<double> load_function(const Cfg& c, const MetricMeasureSpace& space,
                                  std::uint64_t seed);

}  // namespace rinorm::app
