#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace critwave::exp {

inline const std::vector<std::string> kExperiments = {"moser", "ode",       "pde",
                                                      "cone",  "projector", "strichartz"};

/// Every numeric parameter is list-valued; scalars are one-element lists.
using ParamMap = std::map<std::string, std::vector<double>>;

struct ExperimentConfig {
  std::string experiment;
  ParamMap params;
  std::string out_dir = "critwave-out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = false;
  bool strict = false;
  bool reproducible = false;  // drop wall-clock fields so reruns are byte-identical
  bool snapshots = false;     // write binary trajectory frames where available
  std::uint64_t seed = 20240601;

  const std::vector<double>& list(const std::string& key) const;
  double get(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;

  nlohmann::json echo() const;
};

/// Built-in parameter defaults of an experiment; throws ConfigError for an
/// unknown experiment id.
ParamMap default_params(const std::string& experiment);

/// Layered construction: defaults, then `file` (may be null), then the CLI
/// overrides. Unknown keys and malformed values raise ConfigError.
ExperimentConfig make_config(const std::string& experiment, const nlohmann::json* file,
                             const ParamMap& cli_overrides);

/// Parses "1,2,3", "4:8" (inclusive integer range) or "16:512:x2"
/// (geometric range) into a list.
std::vector<double> parse_list(const std::string& text);

/// "csv,json,svg" -> flags; throws ConfigError on an unknown format.
void apply_emit(ExperimentConfig& cfg, const std::string& spec);

/// Checks each experiment's parameter preconditions before dispatch.
void validate(const ExperimentConfig& cfg);

}  // namespace critwave::exp
