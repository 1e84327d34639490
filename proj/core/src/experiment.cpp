#include "satmarl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "satmarl/checkpoint.hpp"
#include "satmarl/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace satmarl {

namespace {

constexpr const char* kCodeVersion = "satmarl 0.1.0";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write file: " + path.string());
  os << content;
}

std::string action_label(int index, int k_slots) {
  const Action a = action_from_index(index, k_slots);
  switch (a.type) {
    case ActionType::charge: return "charge";
    case ActionType::downlink: return "downlink";
    case ActionType::desaturate: return "desaturate";
    case ActionType::capture: return "capture_" + std::to_string(a.slot);
  }
  return "?";
}

json metrics_to_json(const IterationMetrics& m) {
  return json{{"iteration", m.iteration},
              {"env_steps", m.env_steps},
              {"episodes", m.episodes},
              {"mean_return", m.mean_return},
              {"unique_captures", m.mean_unique_captures},
              {"failures", m.mean_failures},
              {"entropy", m.entropy},
              {"clip_fraction", m.clip_fraction},
              {"approx_kl", m.approx_kl},
              {"total_loss", m.total_loss}};
}

}  // namespace

std::string config_hash_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string resolve_output_dir(const std::string& output_dir) {
  const char* root = std::getenv(kOutputRootEnvVar);
  if (root == nullptr || *root == '\0' || fs::path(output_dir).is_absolute()) {
    return output_dir;
  }
  return (fs::path(root) / output_dir).string();
}

int run_experiment(const ExperimentConfig& exp, const std::string& config_text,
                   std::ostream& err) {
  const std::string started_at = iso8601_utc_now();
  const fs::path run_dir = resolve_output_dir(exp.output_dir);
  fs::create_directories(run_dir);
  write_file(run_dir / "config.ini", config_text);

  // Train each seed; seeds are independent, so they may run in parallel.
  const std::size_t n_seeds = exp.seeds.size();
  std::vector<TrainResult> results(n_seeds);
  std::vector<std::string> errors(n_seeds);
  {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(n_seeds, hw);
    std::vector<std::thread> workers;
    std::size_t next = 0;
    std::mutex mu;
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          std::size_t idx;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= n_seeds) return;
            idx = next++;
          }
          try {
            results[idx] = train(exp.algorithm, exp.env, exp.train, exp.seeds[idx]);
          } catch (const std::exception& e) {
            errors[idx] = e.what();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  for (std::size_t i = 0; i < n_seeds; ++i) {
    if (!errors[i].empty()) {
      err << "seed " << exp.seeds[i] << ": " << errors[i] << "\n";
      return kExitConfig;
    }
  }

  // Per-seed outputs.
  json seed_outputs = json::array();
  bool any_abort = false;
  for (std::size_t i = 0; i < n_seeds; ++i) {
    const auto seed = exp.seeds[i];
    const TrainResult& res = results[i];
    any_abort = any_abort || res.aborted;

    const fs::path seed_dir = run_dir / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);

    {
      std::ofstream os(seed_dir / "metrics.jsonl");
      for (const auto& m : res.metrics) os << metrics_to_json(m).dump() << "\n";
    }

    json ckpt;
    ckpt["algorithm"] = algorithm_name(exp.algorithm);
    ckpt["config_hash"] = config_hash_hex(config_text);
    ckpt["seeds"] = exp.seeds;
    ckpt["seed"] = seed;
    json actor_files = json::array(), critic_files = json::array();
    for (std::size_t a = 0; a < res.agents.actors.size(); ++a) {
      const std::string name = "actor_" + std::to_string(a) + ".nnp";
      save_params((seed_dir / name).string(), res.agents.actors[a]);
      actor_files.push_back(name);
    }
    for (std::size_t c = 0; c < res.agents.critics.size(); ++c) {
      const std::string name = "critic_" + std::to_string(c) + ".nnp";
      save_params((seed_dir / name).string(), res.agents.critics[c]);
      critic_files.push_back(name);
    }
    ckpt["actors"] = actor_files;
    ckpt["critics"] = critic_files;
    if (res.aborted) ckpt["abort_reason"] = res.abort_reason;
    write_file(seed_dir / "checkpoint_manifest.json", ckpt.dump(2) + "\n");

    json entry;
    entry["seed"] = seed;
    entry["dir"] = seed_dir.filename().string();
    entry["metrics"] = "metrics.jsonl";
    entry["aborted"] = res.aborted;
    entry["files"] = json::array();
    entry["files"].push_back("metrics.jsonl");
    entry["files"].push_back("checkpoint_manifest.json");
    for (const auto& f : actor_files) entry["files"].push_back(f);
    for (const auto& f : critic_files) entry["files"].push_back(f);
    seed_outputs.push_back(entry);
  }

  // Merged learning curve.
  {
    std::ofstream os(run_dir / "learning_curve.csv");
    os << "env_steps,seed,mean_return,unique_captures,failures,entropy,clip_fraction\n";
    for (std::size_t i = 0; i < n_seeds; ++i) {
      for (const auto& m : results[i].metrics) {
        os << m.env_steps << "," << exp.seeds[i] << "," << format_double(m.mean_return) << ","
           << format_double(m.mean_unique_captures) << "," << format_double(m.mean_failures)
           << "," << format_double(m.entropy) << "," << format_double(m.clip_fraction) << "\n";
      }
    }
  }

  // Final summary over the last iteration of every seed.
  double final_mean = 0.0;
  int final_count = 0;
  for (const auto& res : results) {
    if (!res.metrics.empty()) {
      final_mean += res.metrics.back().mean_return;
      final_count += 1;
    }
  }
  if (final_count > 0) final_mean /= final_count;

  json manifest;
  manifest["scenario"] = exp.name;
  manifest["algorithm"] = algorithm_name(exp.algorithm);
  manifest["code_version"] = kCodeVersion;
  manifest["config_snapshot"] = config_text;
  manifest["config_hash"] = config_hash_hex(config_text);
  manifest["config_copy"] = "config.ini";
  manifest["started_at"] = started_at;
  manifest["finished_at"] = iso8601_utc_now();
  manifest["seeds"] = exp.seeds;
  manifest["status"] = any_abort ? "numeric_abort" : "ok";
  manifest["outputs"] = {{"learning_curve", "learning_curve.csv"}, {"seeds", seed_outputs}};
  manifest["summary"] = {{"final_mean_return", final_mean},
                         {"total_env_steps", exp.train.total_env_steps}};
  write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");

  if (any_abort) {
    err << "numeric abort; partial outputs preserved in " << run_dir.string() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_train(const std::string& config_path, std::ostream& err) {
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  ExperimentConfig exp;
  try {
    exp = parse_experiment(text);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    return run_experiment(exp, text, err);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

AgentSet load_agent_set(const std::string& seed_dir) {
  const fs::path dir = seed_dir;
  const json ckpt = json::parse(read_file((dir / "checkpoint_manifest.json").string()));
  AgentSet set;
  set.algo = algorithm_from_name(ckpt.at("algorithm").get<std::string>());
  for (const auto& f : ckpt.at("actors")) {
    set.actors.push_back(load_params((dir / f.get<std::string>()).string()));
  }
  for (const auto& f : ckpt.at("critics")) {
    set.critics.push_back(load_params((dir / f.get<std::string>()).string()));
  }
  if (set.actors.empty()) throw ConfigError("checkpoint manifest lists no actors");
  set.n_sats = set.algo == Algorithm::central_ppo ? set.actors[0].spec.n_heads
                                                  : static_cast<int>(set.actors.size());
  return set;
}

int cmd_eval(const std::string& run_dir, int episodes, std::uint64_t seed, std::ostream& err) {
  ExperimentConfig exp;
  json manifest;
  try {
    manifest = json::parse(read_file((fs::path(run_dir) / "manifest.json").string()));
    exp = parse_experiment(manifest.at("config_snapshot").get<std::string>());
  } catch (const std::exception& e) {
    err << "error: cannot load run manifest: " << e.what() << "\n";
    return kExitConfig;
  }
  if (episodes < 1) {
    err << "error: episodes must be >= 1\n";
    return kExitConfig;
  }

  const int n = exp.env.constellation.n_sats;
  const int n_actions = action_count(exp.env.k_slots);
  std::vector<std::vector<long>> action_totals(
      static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(n_actions), 0));
  std::map<std::pair<int, int>, long> capture_totals;
  std::vector<long> active_totals(static_cast<std::size_t>(n), 0);
  json per_seed = json::array();

  try {
    for (const auto seed_value : exp.seeds) {
      const fs::path seed_dir = fs::path(run_dir) / ("seed_" + std::to_string(seed_value));
      const AgentSet agents = load_agent_set(seed_dir.string());
      const EvalMetrics m =
          evaluate(agents, exp.env, episodes, mix_seed(seed, seed_value), EvalPolicy::greedy);
      if (!m.uniqueness_ok) {
        throw NumericError("uniqueness audit failed in evaluation");
      }
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n_actions; ++a) {
          action_totals[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] +=
              m.action_counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        }
        active_totals[static_cast<std::size_t>(i)] += m.active_steps[static_cast<std::size_t>(i)];
      }
      for (const auto& [key, count] : m.capture_counts) capture_totals[key] += count;

      json row;
      row["seed"] = seed_value;
      row["mean_return"] = m.mean_return;
      row["std_return"] = m.std_return;
      row["mean_unique_captures"] = m.mean_unique_captures;
      row["mean_capture_reward"] = m.mean_capture_reward;
      row["total_failures"] = m.total_failures;
      row["unique_captures_per_agent"] = m.unique_captures_per_agent;
      per_seed.push_back(row);
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path eval_dir = fs::path(run_dir) / "eval";
  fs::create_directories(eval_dir);

  {
    std::ofstream os(eval_dir / "action_frequency.csv");
    os << "agent,action,count\n";
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < n_actions; ++a) {
        os << i << "," << action_label(a, exp.env.k_slots) << ","
           << action_totals[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] << "\n";
      }
    }
  }
  {
    std::ofstream os(eval_dir / "capture_histogram.csv");
    os << "agent,target_id,count\n";
    for (const auto& [key, count] : capture_totals) {
      os << key.first << "," << key.second << "," << count << "\n";
    }
  }
  {
    json out;
    out["episodes"] = episodes;
    out["eval_seed"] = seed;
    out["per_seed"] = per_seed;
    out["active_steps_per_agent"] = active_totals;
    write_file(eval_dir / "eval_metrics.json", out.dump(2) + "\n");
  }
  {
    json em;
    em["kind"] = "eval";
    em["run_dir"] = run_dir;
    em["episodes"] = episodes;
    em["eval_seed"] = seed;
    em["created_at"] = iso8601_utc_now();
    em["outputs"] = {"eval_metrics.json", "action_frequency.csv", "capture_histogram.csv"};
    write_file(eval_dir / "manifest.json", em.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir,
               std::ostream& err) {
  if (run_dirs.empty()) {
    err << "error: report requires at least one run directory\n";
    return kExitConfig;
  }

  struct CurveRow {
    long env_steps;
    std::uint64_t seed;
    double mean_return;
  };
  struct RunData {
    std::string algorithm;
    std::string scenario;
    std::vector<CurveRow> rows;
    std::vector<long> grid;  // env_steps of the first seed
  };

  std::vector<RunData> runs;
  try {
    for (const auto& dir : run_dirs) {
      const json manifest = json::parse(read_file((fs::path(dir) / "manifest.json").string()));
      RunData run;
      run.algorithm = manifest.at("algorithm").get<std::string>();
      run.scenario = manifest.at("scenario").get<std::string>();

      std::ifstream is(fs::path(dir) / "learning_curve.csv");
      if (!is) throw ConfigError("missing learning_curve.csv in " + dir);
      std::string line;
      std::getline(is, line);  // header
      std::uint64_t first_seed = 0;
      bool first_seed_set = false;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        CurveRow row{};
        char* end = nullptr;
        row.env_steps = std::strtol(line.c_str(), &end, 10);
        row.seed = std::strtoull(end + 1, &end, 10);
        row.mean_return = std::strtod(end + 1, &end);
        run.rows.push_back(row);
        if (!first_seed_set) {
          first_seed = row.seed;
          first_seed_set = true;
        }
        if (row.seed == first_seed) run.grid.push_back(row.env_steps);
      }
      if (run.rows.empty()) throw ConfigError("empty learning curve in " + dir);
      runs.push_back(std::move(run));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  for (const auto& run : runs) {
    if (run.scenario != runs[0].scenario) {
      err << "error: incompatible runs: scenario '" << run.scenario << "' differs from '"
          << runs[0].scenario << "'; report merges runs of one scenario\n";
      return kExitConfig;
    }
    if (run.grid != runs[0].grid) {
      err << "error: incompatible runs: env_steps grids differ between runs\n";
      return kExitConfig;
    }
  }

  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / "report_curves.csv");
    os << "algorithm,scenario,env_steps,seed,mean_return\n";
    for (const auto& run : runs) {
      for (const auto& row : run.rows) {
        os << run.algorithm << "," << run.scenario << "," << row.env_steps << "," << row.seed
           << "," << format_double(row.mean_return) << "\n";
      }
    }
  }
  {
    std::ofstream os(fs::path(out_dir) / "report_summary.csv");
    os << "algorithm,scenario,env_steps,mean_return_mean,mean_return_std\n";
    for (const auto& run : runs) {
      std::map<long, std::vector<double>> by_step;
      for (const auto& row : run.rows) by_step[row.env_steps].push_back(row.mean_return);
      for (long step : run.grid) {
        const auto& vals = by_step.at(step);
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(vals.size()));
        os << run.algorithm << "," << run.scenario << "," << step << "," << format_double(mean)
           << "," << format_double(sd) << "\n";
      }
    }
  }
  {
    json rm;
    rm["kind"] = "report";
    rm["created_at"] = iso8601_utc_now();
    rm["inputs"] = run_dirs;
    rm["outputs"] = {"report_curves.csv", "report_summary.csv"};
    write_file(fs::path(out_dir) / "report_manifest.json", rm.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_scenarios(std::ostream& out) {
  for (const auto& name : scenario_names()) out << scenario_summary(name) << "\n";
  return kExitOk;
}

}  // namespace satmarl
