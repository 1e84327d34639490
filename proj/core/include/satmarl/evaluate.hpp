#pragma once

// Greedy (or uniform-random baseline) policy evaluation with per-agent
// action frequencies, per-target capture histograms and the uniqueness
// audit.

#include <cstdint>
#include <map>
#include <vector>

#include "satmarl/trainers.hpp"

namespace satmarl {

enum class EvalPolicy { greedy, random };

struct EvalMetrics {
  int episodes = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double mean_unique_captures = 0.0;
  double mean_capture_reward = 0.0;  // unique-capture reward only, per episode
  int total_failures = 0;

  // [agent][action index] counts over all episodes.
  std::vector<std::vector<long>> action_counts;
  // (agent, target id) -> local capture count (duplicates included).
  std::map<std::pair<int, int>, long> capture_counts;
  std::vector<long> active_steps;            // per agent
  std::vector<long> unique_captures_per_agent;

  // Audit: event-log recount matches the accumulated capture reward and
  // never exceeds the episode's total priority mass.
  bool uniqueness_ok = true;
  double max_recount_error = 0.0;
};

EvalMetrics evaluate(const AgentSet& agents, const EnvConfig& env_cfg, int n_episodes,
                     std::uint64_t seed, EvalPolicy policy = EvalPolicy::greedy);

}  // namespace satmarl
