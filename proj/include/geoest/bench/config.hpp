#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoest/types.hpp"

namespace geoest::bench {

/// Malformed configuration. The message starts with "<source>:<line>: ".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw JSON text plus a parsed document, able to point errors at the line of
/// the offending key.
class ConfigSource {
 public:
  ConfigSource(std::string text, std::string origin);
  static ConfigSource from_file(const std::string& path);

  const nlohmann::json& root() const { return root_; }
  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

  /// Line (1-based) of the key path `path` ("a.b.c"); 1 when not found.
  int line_of(const std::string& path) const;
  [[noreturn]] void fail(const std::string& path, const std::string& message) const;

  // Typed accessors; `path` is the dotted key path of `j` inside the document.
  const nlohmann::json& require(const nlohmann::json& j, const std::string& path, const std::string& key) const;
  double number(const nlohmann::json& j, const std::string& path) const;
  std::int64_t integer(const nlohmann::json& j, const std::string& path) const;
  std::uint64_t unsigned_integer(const nlohmann::json& j, const std::string& path) const;
  std::string string(const nlohmann::json& j, const std::string& path) const;
  std::vector<double> numbers(const nlohmann::json& j, const std::string& path) const;
  std::vector<std::int64_t> integers(const nlohmann::json& j, const std::string& path) const;

 private:
  std::string text_;
  std::string origin_;
  nlohmann::json root_;
};

FeasibleSet parse_set(const ConfigSource& src, const nlohmann::json& j, const std::string& path,
                      std::optional<std::int64_t> n);
LinkFunction parse_link(const ConfigSource& src, const nlohmann::json& j, const std::string& path);
NoiseDist parse_noise(const ConfigSource& src, const nlohmann::json& j, const std::string& path);
ObservationModel parse_model(const ConfigSource& src, const nlohmann::json& j, const std::string& path);
/// Either a list of scales or {"min", "max", "count"} (log-spaced).
std::vector<double> parse_t_grid(const ConfigSource& src, const nlohmann::json& j, const std::string& path);

nlohmann::json set_to_json(const FeasibleSet& set);
nlohmann::json link_to_json(const LinkFunction& f);
nlohmann::json noise_to_json(const NoiseDist& d);
nlohmann::json model_to_json(const ObservationModel& m);

inline const std::vector<std::string> kAllMetrics = {"linear_error", "linear_error_sq", "projected_error",
                                                     "direction_error", "scaled_error"};

struct ExperimentConfig {
  std::string id = "experiment";
  FeasibleSet set = FeasibleSet::full_space(1);
  ObservationModel model;
  double norm_x = 1.0;
  /// Empty for a random signal drawn per trial.
  std::optional<Vector> fixed_signal;
  std::vector<std::int64_t> m_grid;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> metrics = {"linear_error", "linear_error_sq", "projected_error"};
  /// Scales for bound evaluation; empty means the default grid.
  std::vector<double> t_grid;
  std::int64_t width_samples = 2000;
  std::int64_t mc_samples = 1'000'000;
  /// Echo of the configuration as parsed (seed overrides applied).
  nlohmann::json echo;
};

ExperimentConfig parse_experiment(const ConfigSource& src);
ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::string& origin = "<inline>");

struct MatCompConfig {
  std::string id = "matcomp";
  std::int64_t d = 100;
  std::int64_t r = 2;
  std::vector<double> p_grid;
  double zeta = 1.0;
  double nu = 0.0;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  nlohmann::json echo;
};

MatCompConfig parse_matcomp(const ConfigSource& src);
MatCompConfig matcomp_from_json(const nlohmann::json& j, const std::string& origin = "<inline>");

}  // namespace geoest::bench
