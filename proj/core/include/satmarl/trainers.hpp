#pragma once

// Rollout collection and the five training algorithms: single-agent PPO,
// fully centralised PPO, IPPO, MAPPO and HAPPO. Decentralised actors see
// only their own observations; centralised critics see the global state.

#include <cstdint>
#include <string>
#include <vector>

#include "satmarl/env.hpp"
#include "satmarl/nn.hpp"
#include "satmarl/ppo.hpp"
#include "satmarl/rollout.hpp"

namespace satmarl {

enum class Algorithm { ppo, central_ppo, ippo, mappo, happo };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // throws ConfigError

enum class CollectMode { decentralised, centralised };
CollectMode collect_mode(Algorithm a);

struct AgentSet {
  Algorithm algo = Algorithm::ppo;
  int n_sats = 1;
  // Decentralised: one actor per agent. Centralised: a single actor over
  // the concatenated observation with one categorical head per agent.
  std::vector<ParamVector> actors;
  // ppo/ippo: per-agent critics on local observations; central_ppo/mappo:
  // one critic on the global state; happo: per-agent critics on the
  // global state.
  std::vector<ParamVector> critics;
  std::vector<AdamState> actor_opt;
  std::vector<AdamState> critic_opt;
};

AgentSet make_agent_set(Algorithm algo, const Env& env, const TrainConfig& cfg,
                        std::uint64_t seed);

// An environment plus the episode bookkeeping needed for auto-resetting
// collection windows.
struct EnvSession {
  Env env;
  std::uint64_t session_seed = 0;
  std::uint64_t episode_counter = 0;
  std::vector<Observation> obs;
  double ep_return = 0.0;
  int ep_captures = 0;
  int ep_failures = 0;

  explicit EnvSession(EnvConfig cfg, std::uint64_t seed = 0)
      : env(std::move(cfg)), session_seed(seed) {}
  void ensure_reset();
};

// Collects exactly n_steps environment steps, auto-resetting episodes.
// Values (including the window bootstrap) follow the algorithm's critic
// inputs; advantages/returns are left for the trainer to fill via GAE.
RolloutBuffer collect_rollouts(EnvSession& session, const AgentSet& agents, CollectMode mode,
                               int n_steps, Rng& rng);

struct IterationMetrics {
  int iteration = 0;
  long env_steps = 0;
  double mean_return = 0.0;
  double mean_unique_captures = 0.0;
  double mean_failures = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double total_loss = 0.0;
  int episodes = 0;
};

struct TrainResult {
  AgentSet agents;
  std::vector<IterationMetrics> metrics;
  bool aborted = false;
  std::string abort_reason;
};

// Generic entry point; wrappers below fix the algorithm and check the
// satellite-count precondition.
TrainResult train(Algorithm algo, const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  std::uint64_t seed);

TrainResult train_single_ppo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed);
TrainResult train_centralised_ppo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed);
TrainResult train_ippo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed);
TrainResult train_mappo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed);
TrainResult train_happo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed);

}  // namespace satmarl
