#pragma once

// Flat sectioned key-value config files (an INI/TOML-compatible subset:
// sections, strings, numbers, booleans, homogeneous arrays) and the
// experiment description they encode.

#include <map>
#include <string>
#include <vector>

#include "satmarl/env.hpp"
#include "satmarl/rollout.hpp"
#include "satmarl/trainers.hpp"

namespace satmarl {

struct ConfigValue {
  enum class Kind { boolean, number, string, array };
  Kind kind = Kind::number;
  bool b = false;
  double num = 0.0;
  std::string str;
  std::vector<ConfigValue> items;

  static ConfigValue boolean(bool v);
  static ConfigValue number(double v);
  static ConfigValue string(std::string v);
  static ConfigValue array(std::vector<double> v);

  bool as_bool() const;
  double as_number() const;
  long as_int() const;
  const std::string& as_string() const;
  std::vector<double> as_number_array() const;
};

// section -> key -> value. Top-level keys live under the "" section.
using ConfigDoc = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigDoc parse_config(const std::string& text);  // throws ConfigError with line info
std::string serialize_config(const ConfigDoc& doc);

struct ExperimentConfig {
  std::string name = "custom";
  Algorithm algorithm = Algorithm::ppo;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string output_dir = "runs/custom";
  EnvConfig env;
  TrainConfig train;
};

// Doc <-> experiment mapping. experiment_from_config validates everything,
// including the algorithm/satellite-count compatibility rule.
ExperimentConfig experiment_from_config(const ConfigDoc& doc);
ConfigDoc config_from_experiment(const ExperimentConfig& exp);

ExperimentConfig parse_experiment(const std::string& text);
std::string serialize_experiment(const ExperimentConfig& exp);

// Field-wise equality (round-trip checks).
bool experiments_equal(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace satmarl
