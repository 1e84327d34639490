#pragma once

// Trajectory storage, training hyperparameters and generalized advantage
// estimation.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "satmarl/common.hpp"

namespace satmarl {

struct TrainConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double value_coef = 0.5;    // c1
  double entropy_coef = 0.01; // c2
  double lr = 1e-3;
  int update_epochs = 10;
  int minibatches = 4;
  // Environment steps per iteration; 0 means one full episode.
  int rollout_steps = 0;
  long total_env_steps = 20000;
  int eval_episodes = 10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<int> hidden{64, 64};
  // Sequential-update ratio compounding (ablation switch).
  bool happo_compound_ratio = true;
};

void validate_train_config(const TrainConfig& cfg);  // throws ConfigError

// One policy series: per-agent in decentralised modes, a single joint
// series in centralised mode.
struct RolloutSeries {
  Eigen::MatrixXd obs;        // T x actor_input_dim
  Eigen::MatrixXi actions;    // T x n_heads
  Eigen::VectorXd logp;       // T, behavior log-probs
  Eigen::VectorXd values;     // T+1, includes bootstrap
  Eigen::VectorXd advantages; // T, filled by GAE
  Eigen::VectorXd returns;    // T
  Eigen::VectorXd active;     // T, 1 while the agent was active
};

struct RolloutBuffer {
  int n_steps = 0;
  std::vector<RolloutSeries> series;
  Eigen::MatrixXd global_state;  // T x global_dim
  Eigen::VectorXd rewards;       // T, team reward
  Eigen::VectorXd dones;         // T
  // Episodes completed inside this window.
  std::vector<double> episode_returns;
  std::vector<int> episode_unique_captures;
  std::vector<int> episode_failures;
  double mean_entropy = 0.0;  // collection-phase policy entropy
};

// delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t
// A_t = delta_t + gamma*lambda*(1-done_t)*A_{t+1};  returns = A + V.
// `values` must have one more entry than rewards (bootstrap appended).
struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};
GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const Eigen::VectorXd& dones, double gamma, double lambda);

// In-place mean-0/std-1 normalization over the selected rows (std floor 1e-8).
void normalize_advantages(Eigen::VectorXd& adv, const std::vector<int>& rows);

}  // namespace satmarl
