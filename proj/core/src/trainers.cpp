#include "satmarl/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace satmarl {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ppo: return "ppo";
    case Algorithm::central_ppo: return "central_ppo";
    case Algorithm::ippo: return "ippo";
    case Algorithm::mappo: return "mappo";
    case Algorithm::happo: return "happo";
  }
  throw ContractError("algorithm_name: invalid value");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ppo") return Algorithm::ppo;
  if (name == "central_ppo") return Algorithm::central_ppo;
  if (name == "ippo") return Algorithm::ippo;
  if (name == "mappo") return Algorithm::mappo;
  if (name == "happo") return Algorithm::happo;
  throw ConfigError("unknown algorithm: " + name);
}

CollectMode collect_mode(Algorithm a) {
  return a == Algorithm::central_ppo ? CollectMode::centralised : CollectMode::decentralised;
}

AgentSet make_agent_set(Algorithm algo, const Env& env, const TrainConfig& cfg,
                        std::uint64_t seed) {
  const int n = env.n_sats();
  const int obs_dim = observation_length(env.config().k_slots);
  const int global_dim = n * obs_dim + 1;
  const int n_actions = env.action_space();

  AgentSet set;
  set.algo = algo;
  set.n_sats = n;

  auto actor_spec = [&](int input, int heads) {
    MlpSpec s;
    s.input_dim = input;
    s.hidden = cfg.hidden;
    s.head = HeadKind::categorical;
    s.n_actions = n_actions;
    s.n_heads = heads;
    return s;
  };
  auto critic_spec = [&](int input) {
    MlpSpec s;
    s.input_dim = input;
    s.hidden = cfg.hidden;
    s.head = HeadKind::scalar;
    return s;
  };

  switch (algo) {
    case Algorithm::ppo:
    case Algorithm::ippo:
      for (int i = 0; i < n; ++i) {
        set.actors.push_back(init_params(actor_spec(obs_dim, 1), mix_seed(seed, 0xA000u + static_cast<std::uint64_t>(i))));
        set.critics.push_back(init_params(critic_spec(obs_dim), mix_seed(seed, 0xC000u + static_cast<std::uint64_t>(i))));
      }
      break;
    case Algorithm::central_ppo:
      set.actors.push_back(init_params(actor_spec(n * obs_dim, n), mix_seed(seed, 0xA000u)));
      set.critics.push_back(init_params(critic_spec(global_dim), mix_seed(seed, 0xC000u)));
      break;
    case Algorithm::mappo:
      for (int i = 0; i < n; ++i) {
        set.actors.push_back(init_params(actor_spec(obs_dim, 1), mix_seed(seed, 0xA000u + static_cast<std::uint64_t>(i))));
      }
      set.critics.push_back(init_params(critic_spec(global_dim), mix_seed(seed, 0xC000u)));
      break;
    case Algorithm::happo:
      for (int i = 0; i < n; ++i) {
        set.actors.push_back(init_params(actor_spec(obs_dim, 1), mix_seed(seed, 0xA000u + static_cast<std::uint64_t>(i))));
        set.critics.push_back(init_params(critic_spec(global_dim), mix_seed(seed, 0xC000u + static_cast<std::uint64_t>(i))));
      }
      break;
  }

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  for (const auto& a : set.actors) set.actor_opt.push_back(make_adam(a.size(), adam_cfg));
  for (const auto& c : set.critics) set.critic_opt.push_back(make_adam(c.size(), adam_cfg));
  return set;
}

void EnvSession::ensure_reset() {
  if (!env.is_reset() || env.done()) {
    obs = env.reset(mix_seed(session_seed, episode_counter++));
    ep_return = 0.0;
    ep_captures = 0;
    ep_failures = 0;
  }
}

namespace {

Eigen::VectorXd concat_observations(const std::vector<Observation>& obs) {
  Eigen::Index total = 0;
  for (const auto& o : obs) total += o.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& o : obs) {
    out.segment(at, o.size()) = o;
    at += o.size();
  }
  return out;
}

// Critic input for series s at the current env state.
Eigen::VectorXd critic_input(Algorithm algo, const EnvSession& session, int series_index) {
  switch (algo) {
    case Algorithm::ppo:
    case Algorithm::ippo:
      return session.obs[static_cast<std::size_t>(series_index)];
    case Algorithm::central_ppo:
    case Algorithm::mappo:
    case Algorithm::happo:
      return session.env.global_state();
  }
  throw ContractError("critic_input: invalid algorithm");
}

const ParamVector& critic_for_series(const AgentSet& agents, int series_index) {
  return agents.critics.size() == 1 ? agents.critics[0]
                                    : agents.critics[static_cast<std::size_t>(series_index)];
}

}  // namespace

RolloutBuffer collect_rollouts(EnvSession& session, const AgentSet& agents, CollectMode mode,
                               int n_steps, Rng& rng) {
  if (n_steps < 1) throw ContractError("collect_rollouts: n_steps must be >= 1");
  const int n = session.env.n_sats();
  const int obs_dim = observation_length(session.env.config().k_slots);
  const int n_series = mode == CollectMode::centralised ? 1 : n;
  const int n_heads = mode == CollectMode::centralised ? n : 1;
  const int global_dim = n * obs_dim + 1;

  RolloutBuffer buf;
  buf.n_steps = n_steps;
  buf.rewards.resize(n_steps);
  buf.dones.resize(n_steps);
  buf.global_state.resize(n_steps, global_dim);
  buf.series.resize(static_cast<std::size_t>(n_series));
  for (int s = 0; s < n_series; ++s) {
    auto& ser = buf.series[static_cast<std::size_t>(s)];
    const int in_dim = mode == CollectMode::centralised ? n * obs_dim : obs_dim;
    ser.obs.resize(n_steps, in_dim);
    ser.actions.setZero(n_steps, n_heads);
    ser.logp.setZero(n_steps);
    ser.values.setZero(n_steps + 1);
    ser.active.setZero(n_steps);
  }

  double entropy_sum = 0.0;
  long entropy_count = 0;

  for (int t = 0; t < n_steps; ++t) {
    session.ensure_reset();
    buf.global_state.row(t) = session.env.global_state().transpose();

    std::vector<std::optional<Action>> joint(static_cast<std::size_t>(n));
    const auto& active = session.env.active();

    if (mode == CollectMode::centralised) {
      auto& ser = buf.series[0];
      const Eigen::VectorXd cat = concat_observations(session.obs);
      ser.obs.row(t) = cat.transpose();
      const PolicyEval ev = policy_forward(agents.actors[0], cat);
      const int n_actions = agents.actors[0].spec.n_actions;
      double logp = 0.0;
      for (int i = 0; i < n; ++i) {
        const int a = sample_categorical(ev.probs.segment(i * n_actions, n_actions), rng);
        ser.actions(t, i) = a;
        logp += ev.log_probs[i * n_actions + a];
        if (active[static_cast<std::size_t>(i)]) {
          joint[static_cast<std::size_t>(i)] =
              action_from_index(a, session.env.config().k_slots);
        }
      }
      ser.logp[t] = logp;
      ser.active[t] = 1.0;
      ser.values[t] = value_forward(agents.critics[0], critic_input(agents.algo, session, 0));
      entropy_sum += ev.entropy;
      entropy_count += 1;
    } else {
      for (int i = 0; i < n; ++i) {
        auto& ser = buf.series[static_cast<std::size_t>(i)];
        ser.obs.row(t) = session.obs[static_cast<std::size_t>(i)].transpose();
        ser.values[t] = value_forward(critic_for_series(agents, i),
                                      critic_input(agents.algo, session, i));
        if (!active[static_cast<std::size_t>(i)]) continue;
        const PolicyEval ev =
            policy_forward(agents.actors[static_cast<std::size_t>(i)],
                           session.obs[static_cast<std::size_t>(i)]);
        const int a = sample_categorical(ev.probs, rng);
        ser.actions(t, 0) = a;
        ser.logp[t] = ev.log_probs[a];
        ser.active[t] = 1.0;
        joint[static_cast<std::size_t>(i)] = action_from_index(a, session.env.config().k_slots);
        entropy_sum += ev.entropy;
        entropy_count += 1;
      }
    }

    const StepResult res = session.env.step(joint);
    session.obs = res.observations;
    buf.rewards[t] = res.team_reward;
    buf.dones[t] = res.done ? 1.0 : 0.0;
    session.ep_return += res.team_reward;
    for (const auto& agent_events : res.events) {
      for (const auto& ev : agent_events) {
        if (ev.type == EventType::captured) session.ep_captures += 1;
        if (ev.type == EventType::failed) session.ep_failures += 1;
      }
    }
    if (res.done) {
      buf.episode_returns.push_back(session.ep_return);
      buf.episode_unique_captures.push_back(session.ep_captures);
      buf.episode_failures.push_back(session.ep_failures);
    }
  }

  // Window bootstrap: zero when the last step closed an episode.
  const bool terminal = buf.dones[n_steps - 1] != 0.0;
  for (int s = 0; s < n_series; ++s) {
    auto& ser = buf.series[static_cast<std::size_t>(s)];
    ser.values[n_steps] =
        terminal ? 0.0
                 : value_forward(critic_for_series(agents, s),
                                 critic_input(agents.algo, session, s));
  }

  buf.mean_entropy = entropy_count > 0 ? entropy_sum / static_cast<double>(entropy_count) : 0.0;
  return buf;
}

namespace {

std::vector<int> active_rows(const RolloutSeries& ser) {
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(ser.active.size()));
  for (Eigen::Index t = 0; t < ser.active.size(); ++t) {
    if (ser.active[t] != 0.0) rows.push_back(static_cast<int>(t));
  }
  return rows;
}

PpoBatch gather_batch(const RolloutSeries& ser, const Eigen::MatrixXd& critic_obs,
                      const Eigen::VectorXd& advantages, const std::vector<int>& rows) {
  PpoBatch b;
  const auto m = static_cast<Eigen::Index>(rows.size());
  b.actor_obs.resize(m, ser.obs.cols());
  b.critic_obs.resize(m, critic_obs.cols());
  b.actions.resize(m, ser.actions.cols());
  b.old_logp.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int r = rows[static_cast<std::size_t>(k)];
    b.actor_obs.row(k) = ser.obs.row(r);
    b.critic_obs.row(k) = critic_obs.row(r);
    b.actions.row(k) = ser.actions.row(r);
    b.old_logp[k] = ser.logp[r];
    b.advantages[k] = advantages[r];
    b.returns[k] = ser.returns[r];
  }
  return b;
}

std::vector<std::vector<int>> minibatch_split(std::vector<int> rows, int n_minibatches, Rng& rng) {
  rng.shuffle(rows);
  std::vector<std::vector<int>> out;
  const std::size_t total = rows.size();
  const std::size_t base = total / static_cast<std::size_t>(n_minibatches);
  std::size_t rem = total % static_cast<std::size_t>(n_minibatches);
  std::size_t at = 0;
  for (int m = 0; m < n_minibatches && at < total; ++m) {
    std::size_t len = base + (rem > 0 ? 1 : 0);
    if (rem > 0) --rem;
    if (len == 0) continue;
    out.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(at),
                     rows.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return out;
}

struct UpdateStats {
  double loss_sum = 0.0;
  double clip_sum = 0.0;
  double kl_sum = 0.0;
  int count = 0;

  void add(const PpoDiagnostics& d) {
    loss_sum += d.total_loss;
    clip_sum += d.clip_fraction;
    kl_sum += d.approx_kl;
    count += 1;
  }
};

// Recompute behavior-vs-current log-prob ratios for the given rows.
Eigen::VectorXd policy_ratios(const ParamVector& actor, const RolloutSeries& ser,
                              const std::vector<int>& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd obs(m, ser.obs.cols());
  Eigen::MatrixXi actions(m, ser.actions.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    obs.row(k) = ser.obs.row(rows[static_cast<std::size_t>(k)]);
    actions.row(k) = ser.actions.row(rows[static_cast<std::size_t>(k)]);
  }
  const Eigen::MatrixXd logits = mlp_forward(actor, obs);
  Eigen::MatrixXd probs, log_probs;
  softmax_rows(logits, actor.spec.n_heads, probs, log_probs);
  const Eigen::VectorXd new_logp = gather_log_probs(log_probs, actor.spec.n_heads, actions);
  Eigen::VectorXd ratios(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    ratios[k] = std::exp(new_logp[k] - ser.logp[rows[static_cast<std::size_t>(k)]]);
  }
  return ratios;
}

// Epochs x minibatches of Adam steps on the combined or partial PPO loss.
void run_updates(const RolloutSeries& ser, const Eigen::MatrixXd& critic_obs,
                 const Eigen::VectorXd& advantages, ParamVector* actor, AdamState* actor_opt,
                 ParamVector* critic, AdamState* critic_opt, const TrainConfig& cfg, Rng& rng,
                 UpdateStats& stats) {
  const std::vector<int> rows = active_rows(ser);
  if (rows.empty()) return;
  Eigen::VectorXd actor_grad, critic_grad;
  for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
    for (const auto& mb : minibatch_split(rows, cfg.minibatches, rng)) {
      const PpoBatch batch = gather_batch(ser, critic_obs, advantages, mb);
      const PpoDiagnostics diag =
          ppo_loss(batch, actor, critic, cfg, actor != nullptr ? &actor_grad : nullptr,
                   critic != nullptr ? &critic_grad : nullptr);
      if (actor != nullptr) adam_step(actor->data, actor_grad, *actor_opt);
      if (critic != nullptr) adam_step(critic->data, critic_grad, *critic_opt);
      if (actor != nullptr) stats.add(diag);
    }
  }
}

Eigen::VectorXd normalized_advantages(const RolloutSeries& ser, const Eigen::VectorXd& raw) {
  Eigen::VectorXd adv = raw;
  normalize_advantages(adv, active_rows(ser));
  return adv;
}

}  // namespace

TrainResult train(Algorithm algo, const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  std::uint64_t seed) {
  validate_config(env_cfg);
  validate_train_config(train_cfg);
  if (algo == Algorithm::ppo && env_cfg.constellation.n_sats != 1) {
    throw ConfigError("algorithm ppo requires exactly one satellite");
  }

  EnvSession session(env_cfg, mix_seed(seed, 0xE51Du));
  Rng rng(mix_seed(seed, 0x7141u));
  AgentSet agents = make_agent_set(algo, session.env, train_cfg, seed);
  const CollectMode mode = collect_mode(algo);
  const int window =
      train_cfg.rollout_steps > 0 ? train_cfg.rollout_steps : session.env.horizon_steps();

  TrainResult result;
  long steps_done = 0;
  int iteration = 0;

  while (steps_done < train_cfg.total_env_steps) {
    try {
      RolloutBuffer buf = collect_rollouts(session, agents, mode, window, rng);
      steps_done += window;
      iteration += 1;

      for (std::size_t s = 0; s < buf.series.size(); ++s) {
        auto& ser = buf.series[s];
        const GaeResult gae = compute_gae(buf.rewards, ser.values, buf.dones, train_cfg.gamma,
                                          train_cfg.gae_lambda);
        ser.advantages = gae.advantages;
        ser.returns = gae.returns;
      }

      UpdateStats stats;
      switch (algo) {
        case Algorithm::ppo:
        case Algorithm::ippo: {
          for (std::size_t i = 0; i < buf.series.size(); ++i) {
            auto& ser = buf.series[i];
            run_updates(ser, ser.obs, normalized_advantages(ser, ser.advantages),
                        &agents.actors[i], &agents.actor_opt[i], &agents.critics[i],
                        &agents.critic_opt[i], train_cfg, rng, stats);
          }
          break;
        }
        case Algorithm::central_ppo: {
          auto& ser = buf.series[0];
          run_updates(ser, buf.global_state, normalized_advantages(ser, ser.advantages),
                      &agents.actors[0], &agents.actor_opt[0], &agents.critics[0],
                      &agents.critic_opt[0], train_cfg, rng, stats);
          break;
        }
        case Algorithm::mappo: {
          // Actors on local observations with the shared-critic advantages.
          for (std::size_t i = 0; i < buf.series.size(); ++i) {
            auto& ser = buf.series[i];
            run_updates(ser, buf.global_state, normalized_advantages(ser, ser.advantages),
                        &agents.actors[i], &agents.actor_opt[i], nullptr, nullptr, train_cfg,
                        rng, stats);
          }
          // One pass for the shared critic on the global state.
          run_updates(buf.series[0], buf.global_state,
                      normalized_advantages(buf.series[0], buf.series[0].advantages), nullptr,
                      nullptr, &agents.critics[0], &agents.critic_opt[0], train_cfg, rng,
                      stats);
          break;
        }
        case Algorithm::happo: {
          // Sequential update over a random agent permutation with a
          // per-sample compounding factor on the advantages.
          std::vector<int> perm(buf.series.size());
          std::iota(perm.begin(), perm.end(), 0);
          rng.shuffle(perm);
          Eigen::VectorXd compound = Eigen::VectorXd::Ones(buf.n_steps);
          for (int agent : perm) {
            auto& ser = buf.series[static_cast<std::size_t>(agent)];
            const Eigen::VectorXd weighted = compound.cwiseProduct(ser.advantages);
            run_updates(ser, buf.global_state, normalized_advantages(ser, weighted),
                        &agents.actors[static_cast<std::size_t>(agent)],
                        &agents.actor_opt[static_cast<std::size_t>(agent)],
                        &agents.critics[static_cast<std::size_t>(agent)],
                        &agents.critic_opt[static_cast<std::size_t>(agent)], train_cfg, rng,
                        stats);
            if (train_cfg.happo_compound_ratio) {
              const std::vector<int> rows = active_rows(ser);
              const Eigen::VectorXd ratios =
                  policy_ratios(agents.actors[static_cast<std::size_t>(agent)], ser, rows);
              for (std::size_t k = 0; k < rows.size(); ++k) {
                compound[rows[k]] *= ratios[static_cast<Eigen::Index>(k)];
              }
            }
          }
          break;
        }
      }

      IterationMetrics m;
      m.iteration = iteration;
      m.env_steps = steps_done;
      m.episodes = static_cast<int>(buf.episode_returns.size());
      if (!buf.episode_returns.empty()) {
        m.mean_return = std::accumulate(buf.episode_returns.begin(), buf.episode_returns.end(), 0.0) /
                        static_cast<double>(buf.episode_returns.size());
        m.mean_unique_captures =
            std::accumulate(buf.episode_unique_captures.begin(), buf.episode_unique_captures.end(), 0) /
            static_cast<double>(buf.episode_unique_captures.size());
        m.mean_failures =
            std::accumulate(buf.episode_failures.begin(), buf.episode_failures.end(), 0) /
            static_cast<double>(buf.episode_failures.size());
      }
      m.entropy = buf.mean_entropy;
      if (stats.count > 0) {
        m.clip_fraction = stats.clip_sum / stats.count;
        m.approx_kl = stats.kl_sum / stats.count;
        m.total_loss = stats.loss_sum / stats.count;
      }
      result.metrics.push_back(m);
    } catch (const NumericError& err) {
      result.aborted = true;
      result.abort_reason = err.what();
      break;
    }
  }

  result.agents = std::move(agents);
  return result;
}

TrainResult train_single_ppo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed) {
  return train(Algorithm::ppo, env_cfg, cfg, seed);
}
TrainResult train_centralised_ppo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed) {
  return train(Algorithm::central_ppo, env_cfg, cfg, seed);
}
TrainResult train_ippo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed) {
  return train(Algorithm::ippo, env_cfg, cfg, seed);
}
TrainResult train_mappo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed) {
  return train(Algorithm::mappo, env_cfg, cfg, seed);
}
TrainResult train_happo(const EnvConfig& env_cfg, const TrainConfig& cfg, std::uint64_t seed) {
  return train(Algorithm::happo, env_cfg, cfg, seed);
}

}  // namespace satmarl
