#include "satmarl/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace satmarl {

ConfigValue ConfigValue::boolean(bool v) {
  ConfigValue c;
  c.kind = Kind::boolean;
  c.b = v;
  return c;
}
ConfigValue ConfigValue::number(double v) {
  ConfigValue c;
  c.kind = Kind::number;
  c.num = v;
  return c;
}
ConfigValue ConfigValue::string(std::string v) {
  ConfigValue c;
  c.kind = Kind::string;
  c.str = std::move(v);
  return c;
}
ConfigValue ConfigValue::array(std::vector<double> v) {
  ConfigValue c;
  c.kind = Kind::array;
  for (double x : v) c.items.push_back(ConfigValue::number(x));
  return c;
}

bool ConfigValue::as_bool() const {
  if (kind != Kind::boolean) throw ConfigError("config: expected a boolean");
  return b;
}
double ConfigValue::as_number() const {
  if (kind != Kind::number) throw ConfigError("config: expected a number");
  return num;
}
long ConfigValue::as_int() const {
  const double v = as_number();
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) throw ConfigError("config: expected an integer");
  return static_cast<long>(r);
}
const std::string& ConfigValue::as_string() const {
  if (kind != Kind::string) throw ConfigError("config: expected a string");
  return str;
}
std::vector<double> ConfigValue::as_number_array() const {
  if (kind != Kind::array) throw ConfigError("config: expected an array");
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.as_number());
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

ConfigValue parse_scalar(const std::string& tok, int line) {
  if (tok == "true") return ConfigValue::boolean(true);
  if (tok == "false") return ConfigValue::boolean(false);
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
      if (tok[i] == '\\' && i + 2 < tok.size()) {
        ++i;
        out.push_back(tok[i]);
      } else {
        out.push_back(tok[i]);
      }
    }
    return ConfigValue::string(out);
  }
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') fail(line, "cannot parse value '" + tok + "'");
  return ConfigValue::number(v);
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string tok = trim(raw);
  if (tok.empty()) fail(line, "empty value");
  if (tok.front() == '[') {
    if (tok.back() != ']') fail(line, "unterminated array");
    ConfigValue arr;
    arr.kind = ConfigValue::Kind::array;
    const std::string inner = tok.substr(1, tok.size() - 2);
    std::string cur;
    bool in_str = false;
    auto flush = [&]() {
      const std::string t = trim(cur);
      if (!t.empty()) arr.items.push_back(parse_scalar(t, line));
      cur.clear();
    };
    for (char ch : inner) {
      if (ch == '"') in_str = !in_str;
      if (ch == ',' && !in_str) {
        flush();
      } else {
        cur.push_back(ch);
      }
    }
    flush();
    if (in_str) fail(line, "unterminated string in array");
    if (!arr.items.empty()) {
      for (const auto& it : arr.items) {
        if (it.kind != arr.items[0].kind) fail(line, "arrays must be homogeneous");
      }
    }
    return arr;
  }
  return parse_scalar(tok, line);
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::round(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  // 12 significant digits: clean output, round-trips within the equality
  // tolerance used for configs.
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_value(const ConfigValue& v) {
  switch (v.kind) {
    case ConfigValue::Kind::boolean:
      return v.b ? "true" : "false";
    case ConfigValue::Kind::number:
      return format_number(v.num);
    case ConfigValue::Kind::string:
      return "\"" + v.str + "\"";
    case ConfigValue::Kind::array: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_value(v.items[i]);
      }
      return out + "]";
    }
  }
  return "";
}

}  // namespace

ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      doc[section];
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    if (doc[section].count(key) != 0) fail(line_no, "duplicate key '" + key + "'");
    doc[section][key] = parse_value(line.substr(eq + 1), line_no);
  }
  return doc;
}

std::string serialize_config(const ConfigDoc& doc) {
  std::ostringstream os;
  auto emit_section = [&](const std::string& name, const std::map<std::string, ConfigValue>& kv) {
    if (!name.empty()) os << "[" << name << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << format_value(v) << "\n";
    os << "\n";
  };
  if (doc.count("") != 0) emit_section("", doc.at(""));
  for (const auto& [name, kv] : doc) {
    if (name.empty()) continue;
    emit_section(name, kv);
  }
  return os.str();
}

namespace {

const ConfigValue* find(const ConfigDoc& doc, const std::string& section, const std::string& key) {
  const auto sec = doc.find(section);
  if (sec == doc.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

double get_num(const ConfigDoc& doc, const std::string& s, const std::string& k, double dflt) {
  const auto* v = find(doc, s, k);
  return v != nullptr ? v->as_number() : dflt;
}
long get_int(const ConfigDoc& doc, const std::string& s, const std::string& k, long dflt) {
  const auto* v = find(doc, s, k);
  return v != nullptr ? v->as_int() : dflt;
}
bool get_bool(const ConfigDoc& doc, const std::string& s, const std::string& k, bool dflt) {
  const auto* v = find(doc, s, k);
  return v != nullptr ? v->as_bool() : dflt;
}
std::string get_str(const ConfigDoc& doc, const std::string& s, const std::string& k,
                    const std::string& dflt) {
  const auto* v = find(doc, s, k);
  return v != nullptr ? v->as_string() : dflt;
}

SatelliteParams params_from_section(const std::map<std::string, ConfigValue>& kv,
                                    SatelliteParams base) {
  auto num = [&](const char* key, double& field) {
    const auto it = kv.find(key);
    if (it != kv.end()) field = it->second.as_number();
  };
  num("b_min_wh", base.b_min_wh);
  num("b_max_wh", base.b_max_wh);
  num("d_max_gb", base.d_max_gb);
  num("omega_max_rpm", base.omega_max_rpm);
  num("base_draw_wh", base.base_draw_wh);
  num("capture_cost_wh", base.capture_cost_wh);
  num("downlink_cost_wh", base.downlink_cost_wh);
  num("desat_cost_wh", base.desat_cost_wh);
  num("charge_gain_wh", base.charge_gain_wh);
  num("image_size_gb", base.image_size_gb);
  num("baud_gb_per_step", base.baud_gb_per_step);
  num("slew_rpm_min", base.slew_rpm_min);
  num("slew_rpm_max", base.slew_rpm_max);
  num("desat_rate_rpm", base.desat_rate_rpm);
  return base;
}

void section_from_params(ConfigDoc& doc, const std::string& section, const SatelliteParams& p) {
  auto& kv = doc[section];
  kv["b_min_wh"] = ConfigValue::number(p.b_min_wh);
  kv["b_max_wh"] = ConfigValue::number(p.b_max_wh);
  kv["d_max_gb"] = ConfigValue::number(p.d_max_gb);
  kv["omega_max_rpm"] = ConfigValue::number(p.omega_max_rpm);
  kv["base_draw_wh"] = ConfigValue::number(p.base_draw_wh);
  kv["capture_cost_wh"] = ConfigValue::number(p.capture_cost_wh);
  kv["downlink_cost_wh"] = ConfigValue::number(p.downlink_cost_wh);
  kv["desat_cost_wh"] = ConfigValue::number(p.desat_cost_wh);
  kv["charge_gain_wh"] = ConfigValue::number(p.charge_gain_wh);
  kv["image_size_gb"] = ConfigValue::number(p.image_size_gb);
  kv["baud_gb_per_step"] = ConfigValue::number(p.baud_gb_per_step);
  kv["slew_rpm_min"] = ConfigValue::number(p.slew_rpm_min);
  kv["slew_rpm_max"] = ConfigValue::number(p.slew_rpm_max);
  kv["desat_rate_rpm"] = ConfigValue::number(p.desat_rate_rpm);
}

}  // namespace

ExperimentConfig experiment_from_config(const ConfigDoc& doc) {
  ExperimentConfig exp;
  exp.name = get_str(doc, "", "name", exp.name);
  exp.algorithm = algorithm_from_name(get_str(doc, "", "algorithm", "ppo"));
  exp.output_dir = get_str(doc, "", "output_dir", "runs/" + exp.name);
  if (const auto* v = find(doc, "", "seeds")) {
    exp.seeds.clear();
    for (double s : v->as_number_array()) {
      if (s < 0 || s != std::round(s)) throw ConfigError("seeds must be nonnegative integers");
      exp.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (exp.seeds.empty()) throw ConfigError("seeds must be nonempty");

  // [env]
  EnvConfig& env = exp.env;
  const std::string kind = get_str(doc, "env", "constellation", "cluster");
  if (kind == "cluster") {
    env.constellation.kind = ConstellationKind::cluster;
  } else if (kind == "walker_delta") {
    env.constellation.kind = ConstellationKind::walker_delta;
  } else {
    throw ConfigError("constellation must be 'cluster' or 'walker_delta'");
  }
  env.constellation.n_sats = static_cast<int>(get_int(doc, "env", "n_sats", 1));
  env.constellation.n_planes = static_cast<int>(get_int(doc, "env", "n_planes", 1));
  env.constellation.phasing_f = static_cast<int>(get_int(doc, "env", "phasing_f", 0));
  env.constellation.altitude_km = get_num(doc, "env", "altitude_km", 500.0);
  env.constellation.inclination_rad = deg2rad(get_num(doc, "env", "inclination_deg", 45.0));
  env.constellation.cluster_spacing_rad =
      deg2rad(get_num(doc, "env", "cluster_spacing_deg", 0.5));
  env.n_targets = static_cast<int>(get_int(doc, "env", "n_targets", 2000));
  env.horizon_orbits = get_num(doc, "env", "horizon_orbits", 2.0);
  env.dt_s = get_num(doc, "env", "dt_s", 60.0);
  env.k_slots = static_cast<int>(get_int(doc, "env", "k_slots", 3));
  env.target_elev_min_rad = deg2rad(get_num(doc, "env", "target_elev_min_deg", 60.0));
  env.gs_elev_min_rad = deg2rad(get_num(doc, "env", "gs_elev_min_deg", 10.0));
  env.randomize.rw_init = get_bool(doc, "env", "randomize_rw", false);
  env.randomize.battery_init = get_bool(doc, "env", "randomize_battery", false);
  env.randomize.storage_init = get_bool(doc, "env", "randomize_storage", false);
  env.randomize.disturbance = get_bool(doc, "env", "disturbance", false);
  env.disturbance_fail_prob = get_num(doc, "env", "disturbance_fail_prob", 0.05);
  env.master_seed = static_cast<std::uint64_t>(get_int(doc, "env", "master_seed", 0));

  const auto* lat = find(doc, "env", "ground_stations_lat_deg");
  const auto* lon = find(doc, "env", "ground_stations_lon_deg");
  if ((lat == nullptr) != (lon == nullptr)) {
    throw ConfigError("ground station latitudes and longitudes must both be given");
  }
  if (lat != nullptr) {
    const auto las = lat->as_number_array();
    const auto los = lon->as_number_array();
    if (las.size() != los.size()) throw ConfigError("ground station arrays length mismatch");
    env.ground_stations.clear();
    for (std::size_t i = 0; i < las.size(); ++i) {
      env.ground_stations.push_back({deg2rad(las[i]), deg2rad(los[i])});
    }
  }

  // [sat] defaults + optional [sat.<i>] overrides.
  SatelliteParams base;
  if (doc.count("sat") != 0) base = params_from_section(doc.at("sat"), base);
  bool any_override = false;
  for (int i = 0; i < env.constellation.n_sats; ++i) {
    if (doc.count("sat." + std::to_string(i)) != 0) any_override = true;
  }
  if (any_override) {
    env.sat_params.clear();
    for (int i = 0; i < env.constellation.n_sats; ++i) {
      const std::string sec = "sat." + std::to_string(i);
      env.sat_params.push_back(doc.count(sec) != 0 ? params_from_section(doc.at(sec), base)
                                                   : base);
    }
  } else {
    env.sat_params = {base};
  }

  // [train]
  TrainConfig& tr = exp.train;
  tr.gamma = get_num(doc, "train", "gamma", tr.gamma);
  tr.gae_lambda = get_num(doc, "train", "gae_lambda", tr.gae_lambda);
  tr.clip_eps = get_num(doc, "train", "clip_eps", tr.clip_eps);
  tr.value_coef = get_num(doc, "train", "value_coef", tr.value_coef);
  tr.entropy_coef = get_num(doc, "train", "entropy_coef", tr.entropy_coef);
  tr.lr = get_num(doc, "train", "lr", tr.lr);
  tr.update_epochs = static_cast<int>(get_int(doc, "train", "update_epochs", tr.update_epochs));
  tr.minibatches = static_cast<int>(get_int(doc, "train", "minibatches", tr.minibatches));
  tr.rollout_steps = static_cast<int>(get_int(doc, "train", "rollout_steps", tr.rollout_steps));
  tr.total_env_steps = get_int(doc, "train", "total_env_steps", tr.total_env_steps);
  tr.eval_episodes = static_cast<int>(get_int(doc, "train", "eval_episodes", tr.eval_episodes));
  tr.happo_compound_ratio = get_bool(doc, "train", "happo_compound_ratio", true);
  if (const auto* v = find(doc, "train", "hidden")) {
    tr.hidden.clear();
    for (double h : v->as_number_array()) tr.hidden.push_back(static_cast<int>(h));
  }
  tr.seeds = exp.seeds;

  // Validation: env, train, and the algorithm compatibility rule.
  validate_config(env);
  validate_train_config(tr);
  if (exp.algorithm == Algorithm::ppo && env.constellation.n_sats != 1) {
    throw ConfigError("algorithm ppo requires n_sats = 1");
  }
  return exp;
}

ConfigDoc config_from_experiment(const ExperimentConfig& exp) {
  ConfigDoc doc;
  auto& top = doc[""];
  top["name"] = ConfigValue::string(exp.name);
  top["algorithm"] = ConfigValue::string(algorithm_name(exp.algorithm));
  top["output_dir"] = ConfigValue::string(exp.output_dir);
  {
    ConfigValue seeds;
    seeds.kind = ConfigValue::Kind::array;
    for (auto s : exp.seeds) seeds.items.push_back(ConfigValue::number(static_cast<double>(s)));
    top["seeds"] = seeds;
  }

  auto& env = doc["env"];
  const auto& e = exp.env;
  env["constellation"] = ConfigValue::string(
      e.constellation.kind == ConstellationKind::cluster ? "cluster" : "walker_delta");
  env["n_sats"] = ConfigValue::number(e.constellation.n_sats);
  env["n_planes"] = ConfigValue::number(e.constellation.n_planes);
  env["phasing_f"] = ConfigValue::number(e.constellation.phasing_f);
  env["altitude_km"] = ConfigValue::number(e.constellation.altitude_km);
  env["inclination_deg"] = ConfigValue::number(rad2deg(e.constellation.inclination_rad));
  env["cluster_spacing_deg"] = ConfigValue::number(rad2deg(e.constellation.cluster_spacing_rad));
  env["n_targets"] = ConfigValue::number(e.n_targets);
  env["horizon_orbits"] = ConfigValue::number(e.horizon_orbits);
  env["dt_s"] = ConfigValue::number(e.dt_s);
  env["k_slots"] = ConfigValue::number(e.k_slots);
  env["target_elev_min_deg"] = ConfigValue::number(rad2deg(e.target_elev_min_rad));
  env["gs_elev_min_deg"] = ConfigValue::number(rad2deg(e.gs_elev_min_rad));
  env["randomize_rw"] = ConfigValue::boolean(e.randomize.rw_init);
  env["randomize_battery"] = ConfigValue::boolean(e.randomize.battery_init);
  env["randomize_storage"] = ConfigValue::boolean(e.randomize.storage_init);
  env["disturbance"] = ConfigValue::boolean(e.randomize.disturbance);
  env["disturbance_fail_prob"] = ConfigValue::number(e.disturbance_fail_prob);
  env["master_seed"] = ConfigValue::number(static_cast<double>(e.master_seed));
  {
    std::vector<double> lat, lon;
    for (const auto& gp : e.ground_stations) {
      lat.push_back(rad2deg(gp.lat_rad));
      lon.push_back(rad2deg(gp.lon_rad));
    }
    env["ground_stations_lat_deg"] = ConfigValue::array(lat);
    env["ground_stations_lon_deg"] = ConfigValue::array(lon);
  }

  section_from_params(doc, "sat", e.sat_params[0]);
  if (e.sat_params.size() > 1) {
    for (std::size_t i = 0; i < e.sat_params.size(); ++i) {
      section_from_params(doc, "sat." + std::to_string(i), e.sat_params[i]);
    }
  }

  auto& tr = doc["train"];
  const auto& t = exp.train;
  tr["gamma"] = ConfigValue::number(t.gamma);
  tr["gae_lambda"] = ConfigValue::number(t.gae_lambda);
  tr["clip_eps"] = ConfigValue::number(t.clip_eps);
  tr["value_coef"] = ConfigValue::number(t.value_coef);
  tr["entropy_coef"] = ConfigValue::number(t.entropy_coef);
  tr["lr"] = ConfigValue::number(t.lr);
  tr["update_epochs"] = ConfigValue::number(t.update_epochs);
  tr["minibatches"] = ConfigValue::number(t.minibatches);
  tr["rollout_steps"] = ConfigValue::number(t.rollout_steps);
  tr["total_env_steps"] = ConfigValue::number(static_cast<double>(t.total_env_steps));
  tr["eval_episodes"] = ConfigValue::number(t.eval_episodes);
  tr["happo_compound_ratio"] = ConfigValue::boolean(t.happo_compound_ratio);
  {
    std::vector<double> hidden;
    for (int h : t.hidden) hidden.push_back(h);
    tr["hidden"] = ConfigValue::array(hidden);
  }
  return doc;
}

ExperimentConfig parse_experiment(const std::string& text) {
  return experiment_from_config(parse_config(text));
}

std::string serialize_experiment(const ExperimentConfig& exp) {
  return serialize_config(config_from_experiment(exp));
}

namespace {

bool params_equal(const SatelliteParams& a, const SatelliteParams& b) {
  return a.b_min_wh == b.b_min_wh && a.b_max_wh == b.b_max_wh && a.d_max_gb == b.d_max_gb &&
         a.omega_max_rpm == b.omega_max_rpm && a.base_draw_wh == b.base_draw_wh &&
         a.capture_cost_wh == b.capture_cost_wh && a.downlink_cost_wh == b.downlink_cost_wh &&
         a.desat_cost_wh == b.desat_cost_wh && a.charge_gain_wh == b.charge_gain_wh &&
         a.image_size_gb == b.image_size_gb && a.baud_gb_per_step == b.baud_gb_per_step &&
         a.slew_rpm_min == b.slew_rpm_min && a.slew_rpm_max == b.slew_rpm_max &&
         a.desat_rate_rpm == b.desat_rate_rpm;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

bool experiments_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.name != b.name || a.algorithm != b.algorithm || a.seeds != b.seeds ||
      a.output_dir != b.output_dir) {
    return false;
  }
  const auto& ea = a.env;
  const auto& eb = b.env;
  if (ea.constellation.kind != eb.constellation.kind ||
      ea.constellation.n_sats != eb.constellation.n_sats ||
      ea.constellation.n_planes != eb.constellation.n_planes ||
      ea.constellation.phasing_f != eb.constellation.phasing_f ||
      !near(ea.constellation.altitude_km, eb.constellation.altitude_km) ||
      !near(ea.constellation.inclination_rad, eb.constellation.inclination_rad) ||
      !near(ea.constellation.cluster_spacing_rad, eb.constellation.cluster_spacing_rad)) {
    return false;
  }
  if (ea.n_targets != eb.n_targets || !near(ea.horizon_orbits, eb.horizon_orbits) ||
      !near(ea.dt_s, eb.dt_s) || ea.k_slots != eb.k_slots ||
      !near(ea.target_elev_min_rad, eb.target_elev_min_rad) ||
      !near(ea.gs_elev_min_rad, eb.gs_elev_min_rad) ||
      ea.randomize.rw_init != eb.randomize.rw_init ||
      ea.randomize.battery_init != eb.randomize.battery_init ||
      ea.randomize.storage_init != eb.randomize.storage_init ||
      ea.randomize.disturbance != eb.randomize.disturbance ||
      !near(ea.disturbance_fail_prob, eb.disturbance_fail_prob) ||
      ea.master_seed != eb.master_seed) {
    return false;
  }
  if (ea.ground_stations.size() != eb.ground_stations.size()) return false;
  for (std::size_t i = 0; i < ea.ground_stations.size(); ++i) {
    if (!near(ea.ground_stations[i].lat_rad, eb.ground_stations[i].lat_rad) ||
        !near(ea.ground_stations[i].lon_rad, eb.ground_stations[i].lon_rad)) {
      return false;
    }
  }
  if (ea.sat_params.size() != eb.sat_params.size()) return false;
  for (std::size_t i = 0; i < ea.sat_params.size(); ++i) {
    if (!params_equal(ea.sat_params[i], eb.sat_params[i])) return false;
  }
  const auto& ta = a.train;
  const auto& tb = b.train;
  return near(ta.gamma, tb.gamma) && near(ta.gae_lambda, tb.gae_lambda) &&
         near(ta.clip_eps, tb.clip_eps) && near(ta.value_coef, tb.value_coef) &&
         near(ta.entropy_coef, tb.entropy_coef) && near(ta.lr, tb.lr) &&
         ta.update_epochs == tb.update_epochs && ta.minibatches == tb.minibatches &&
         ta.rollout_steps == tb.rollout_steps && ta.total_env_steps == tb.total_env_steps &&
         ta.eval_episodes == tb.eval_episodes && ta.hidden == tb.hidden &&
         ta.happo_compound_ratio == tb.happo_compound_ratio && ta.seeds == tb.seeds;
}

}  // namespace satmarl
