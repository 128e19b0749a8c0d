#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "soh/kinetic.hpp"
#include "soh/limit.hpp"
#include "soh/macro.hpp"
#include "soh/torus.hpp"
#include "soh/vmf.hpp"

namespace soh::config {

/// Config text format:
///
///   # comment
///   [params]            # section header, prefixes the keys below it
///   nu = 1.0            # -> params.nu
///   grid.n = 64         # dotted keys work anywhere (prefixed inside a section)
///   limit.epsilons = [0.2, 0.1, 0.05]
///   init.preset = "benchmark"
///
/// Values are numbers, true/false, double-quoted strings or lists of numbers.
/// Environment variables SOH_<KEY> override parsed values, with dots written
/// as double underscores (SOH_PARAMS__NU=2).
using Value = std::variant<bool, long, double, std::string, std::vector<double>>;

inline constexpr const char* kEnvPrefix = "SOH_";

class Config {
 public:
  /// Every key with its default.
  static Config defaults();

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const Value& at(const std::string& key) const;

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;

  /// Throws UnknownKey, ParseError (type mismatch), RangeError.
  void set(const std::string& key, const Value& value);
  /// Parses `raw` as a value literal for `key`.
  void set_from_text(const std::string& key, std::string_view raw);

  /// Throws RangeError naming the first offending key.
  void validate() const;

  /// Nested object keyed by the dotted path components.
  nlohmann::json to_json() const;
  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

/// Throws ParseError (with line:column), UnknownKey, RangeError.
Config parse_config(std::string_view text);
/// Applies SOH_* overrides from `environ`-style entries ("NAME=value").
void apply_env_overrides(Config& cfg, const std::vector<std::string>& environment);
std::vector<std::string> process_environment();

vmf::ModelParams model_params(const Config& cfg);
TorusGrid torus_grid(const Config& cfg);
macro::SolverConfig solver_config(const Config& cfg);
kinetic::KineticConfig kinetic_config(const Config& cfg);
limit::LimitConfig limit_config(const Config& cfg);

}  // namespace soh::config
