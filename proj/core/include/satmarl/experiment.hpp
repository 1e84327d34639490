#pragma once

// Experiment harness: runs trainers across seeds, persists metrics
// (JSON-lines + CSV learning curves), checkpoints and run manifests, and
// merges finished runs into report tables.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numeric failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "satmarl/config.hpp"
#include "satmarl/evaluate.hpp"

namespace satmarl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Environment variable overriding where run directories are created.
inline constexpr const char* kOutputRootEnvVar = "SATMARL_OUTPUT_ROOT";

// Resolves output_dir against the env-var root (absolute paths win).
std::string resolve_output_dir(const std::string& output_dir);

// Runs every seed of the experiment, writing into resolve_output_dir(...):
//   config.ini            byte-identical snapshot of config_text
//   seed_<s>/metrics.jsonl
//   seed_<s>/actor_<i>.nnp, critic_<i>.nnp, checkpoint_manifest.json
//   learning_curve.csv    env_steps,seed,mean_return,unique_captures,
//                         failures,entropy,clip_fraction
//   manifest.json
// Returns kExitOk or kExitNumeric (partial outputs are preserved).
int run_experiment(const ExperimentConfig& exp, const std::string& config_text,
                   std::ostream& err);

int cmd_train(const std::string& config_path, std::ostream& err);

// Loads every seed checkpoint under run_dir, evaluates it greedily, and
// writes eval/eval_metrics.json, eval/action_frequency.csv (agent,action,
// count), eval/capture_histogram.csv (agent,target_id,count) and
// eval/manifest.json. Counts are summed across seeds.
int cmd_eval(const std::string& run_dir, int episodes, std::uint64_t seed, std::ostream& err);

// Merges learning curves of completed runs (same scenario required) into
// report_curves.csv (algorithm,scenario,env_steps,seed,mean_return) and
// report_summary.csv (algorithm,scenario,env_steps,mean_return_mean,
// mean_return_std) under out_dir.
int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir,
               std::ostream& err);

int cmd_scenarios(std::ostream& out);

// Helpers shared with tests.
std::string config_hash_hex(const std::string& text);
std::string iso8601_utc_now();

struct SeedEvalOutcome {
  std::uint64_t seed = 0;
  EvalMetrics metrics;
};

// Loads the AgentSet persisted for one seed directory.
AgentSet load_agent_set(const std::string& seed_dir);

}  // namespace satmarl
