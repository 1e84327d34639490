#include "satmarl/scenarios.hpp"

#include <sstream>

namespace satmarl {

namespace {

// Limited-resource values: 50 Wh battery, 5 GB storage, low baud, large
// images. Defaults are the comfortable end of each range.
constexpr double kLimitedBatteryWh = 50.0;
constexpr double kLimitedStorageGb = 5.0;
constexpr double kLowBaudGbPerStep = 0.03;
constexpr double kLargeImageGb = 2.0;

ExperimentConfig base_single() {
  ExperimentConfig exp;
  exp.algorithm = Algorithm::ppo;
  exp.env.constellation.kind = ConstellationKind::cluster;
  exp.env.constellation.n_sats = 1;
  exp.env.master_seed = 42;
  return exp;
}

ExperimentConfig base_cluster4() {
  ExperimentConfig exp;
  exp.algorithm = Algorithm::mappo;
  exp.env.constellation.kind = ConstellationKind::cluster;
  exp.env.constellation.n_sats = 4;
  exp.env.master_seed = 42;
  return exp;
}

void all_randomizations(EnvConfig& env) {
  env.randomize.rw_init = true;
  env.randomize.battery_init = true;
  env.randomize.storage_init = true;
  env.randomize.disturbance = true;
}

void limited_resources(SatelliteParams& p) {
  p.b_max_wh = kLimitedBatteryWh;
  p.d_max_gb = kLimitedStorageGb;
  p.baud_gb_per_step = kLowBaudGbPerStep;
  p.image_size_gb = kLargeImageGb;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {
      "single_default",
      "single_limited_battery",
      "single_limited_storage",
      "single_random",
      "cluster4_default",
      "cluster4_limited",
      "cluster4_random",
      "walker4_default",
      "cluster4_hetero_storage",
  };
}

bool is_scenario(const std::string& name) {
  for (const auto& n : scenario_names()) {
    if (n == name) return true;
  }
  return false;
}

ExperimentConfig make_scenario(const std::string& name) {
  ExperimentConfig exp;
  if (name == "single_default") {
    exp = base_single();
  } else if (name == "single_limited_battery") {
    exp = base_single();
    exp.env.sat_params[0].b_max_wh = kLimitedBatteryWh;
  } else if (name == "single_limited_storage") {
    exp = base_single();
    exp.env.sat_params[0].d_max_gb = kLimitedStorageGb;
  } else if (name == "single_random") {
    exp = base_single();
    all_randomizations(exp.env);
  } else if (name == "cluster4_default") {
    exp = base_cluster4();
  } else if (name == "cluster4_limited") {
    exp = base_cluster4();
    limited_resources(exp.env.sat_params[0]);
  } else if (name == "cluster4_random") {
    exp = base_cluster4();
    all_randomizations(exp.env);
  } else if (name == "walker4_default") {
    exp = base_cluster4();
    exp.env.constellation.kind = ConstellationKind::walker_delta;
    exp.env.constellation.n_planes = 2;
    exp.env.constellation.phasing_f = 1;
  } else if (name == "cluster4_hetero_storage") {
    exp = base_cluster4();
    SatelliteParams base = exp.env.sat_params[0];
    base.image_size_gb = kLargeImageGb;
    exp.env.sat_params.assign(4, base);
    exp.env.sat_params[0].d_max_gb = 5.0;
    exp.env.sat_params[1].d_max_gb = 10.0;
    exp.env.sat_params[2].d_max_gb = 250.0;
    exp.env.sat_params[3].d_max_gb = 500.0;
  } else {
    throw ConfigError("unknown scenario: " + name);
  }
  exp.name = name;
  exp.output_dir = "runs/" + name;
  return exp;
}

std::string scenario_summary(const std::string& name) {
  const ExperimentConfig exp = make_scenario(name);
  std::ostringstream os;
  os << name << ": " << exp.env.constellation.n_sats << " sat(s), "
     << (exp.env.constellation.kind == ConstellationKind::cluster ? "cluster" : "walker_delta")
     << ", algo " << algorithm_name(exp.algorithm) << ", B_max";
  if (exp.env.sat_params.size() == 1) {
    os << " " << exp.env.sat_params[0].b_max_wh << " Wh, D_max "
       << exp.env.sat_params[0].d_max_gb << " GB";
  } else {
    os << " (";
    for (std::size_t i = 0; i < exp.env.sat_params.size(); ++i) {
      os << (i > 0 ? ", " : "") << exp.env.sat_params[i].b_max_wh;
    }
    os << ") Wh, D_max (";
    for (std::size_t i = 0; i < exp.env.sat_params.size(); ++i) {
      os << (i > 0 ? ", " : "") << exp.env.sat_params[i].d_max_gb;
    }
    os << ") GB";
  }
  const auto& r = exp.env.randomize;
  if (r.rw_init || r.battery_init || r.storage_init || r.disturbance) {
    os << ", randomized";
  }
  return os.str();
}

}  // namespace satmarl
