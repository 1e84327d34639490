#include "satmarl/rollout.hpp"

#include <cmath>

namespace satmarl {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ConfigError("gamma must be in [0, 1]");
  if (cfg.gae_lambda < 0.0 || cfg.gae_lambda > 1.0) throw ConfigError("gae_lambda must be in [0, 1]");
  if (!(cfg.clip_eps > 0.0)) throw ConfigError("clip_eps must be > 0");
  if (!(cfg.lr > 0.0)) throw ConfigError("lr must be > 0");
  if (cfg.update_epochs < 0) throw ConfigError("update_epochs must be >= 0");
  if (cfg.minibatches < 1) throw ConfigError("minibatches must be >= 1");
  if (cfg.rollout_steps < 0) throw ConfigError("rollout_steps must be >= 0");
  if (cfg.total_env_steps < 1) throw ConfigError("total_env_steps must be >= 1");
  if (cfg.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  for (int h : cfg.hidden) {
    if (h < 1) throw ConfigError("hidden layer widths must be >= 1");
  }
}

GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                      const Eigen::VectorXd& dones, double gamma, double lambda) {
  const Eigen::Index t_len = rewards.size();
  if (values.size() != t_len + 1) {
    throw ContractError("compute_gae: values must have length T+1 (bootstrap appended)");
  }
  if (dones.size() != t_len) throw ContractError("compute_gae: dones length mismatch");

  GaeResult out;
  out.advantages.resize(t_len);
  out.returns.resize(t_len);
  double running = 0.0;
  for (Eigen::Index t = t_len - 1; t >= 0; --t) {
    const double not_done = 1.0 - dones[t];
    const double delta = rewards[t] + gamma * values[t + 1] * not_done - values[t];
    running = delta + gamma * lambda * not_done * running;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

void normalize_advantages(Eigen::VectorXd& adv, const std::vector<int>& rows) {
  if (rows.empty()) return;
  double mean = 0.0;
  for (int r : rows) mean += adv[r];
  mean /= static_cast<double>(rows.size());
  double var = 0.0;
  for (int r : rows) var += (adv[r] - mean) * (adv[r] - mean);
  const double std_dev = std::sqrt(var / static_cast<double>(rows.size()));
  const double denom = std::max(std_dev, 1e-8);
  for (int r : rows) adv[r] = (adv[r] - mean) / denom;
}

}  // namespace satmarl
