#include "satmarl/evaluate.hpp"

#include <cmath>

namespace satmarl {

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

}  // namespace

EvalMetrics evaluate(const AgentSet& agents, const EnvConfig& env_cfg, int n_episodes,
                     std::uint64_t seed, EvalPolicy policy) {
  if (n_episodes < 1) throw ContractError("evaluate: n_episodes must be >= 1");
  validate_config(env_cfg);
  Env env(env_cfg);
  const int n = env.n_sats();
  const int n_actions = env.action_space();
  const bool centralised = agents.algo == Algorithm::central_ppo;

  EvalMetrics m;
  m.episodes = n_episodes;
  m.action_counts.assign(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(n_actions), 0));
  m.active_steps.assign(static_cast<std::size_t>(n), 0);
  m.unique_captures_per_agent.assign(static_cast<std::size_t>(n), 0);

  Rng rng(mix_seed(seed, 0xEBA1u));
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(n_episodes));
  double capture_reward_sum = 0.0;
  long unique_captures = 0;

  for (int e = 0; e < n_episodes; ++e) {
    auto obs = env.reset(mix_seed(seed, static_cast<std::uint64_t>(e)));
    double ep_return = 0.0;
    double recount = 0.0;

    while (!env.done()) {
      const auto& active = env.active();
      std::vector<std::optional<Action>> joint(static_cast<std::size_t>(n));

      if (centralised && policy == EvalPolicy::greedy) {
        const PolicyEval ev = policy_forward(agents.actors[0], concat_observations(obs));
        for (int i = 0; i < n; ++i) {
          if (!active[static_cast<std::size_t>(i)]) continue;
          const int a = argmax_index(ev.probs.segment(i * n_actions, n_actions));
          joint[static_cast<std::size_t>(i)] = action_from_index(a, env_cfg.k_slots);
        }
      } else {
        for (int i = 0; i < n; ++i) {
          if (!active[static_cast<std::size_t>(i)]) continue;
          int a;
          if (policy == EvalPolicy::random) {
            a = rng.uniform_int(n_actions);
          } else {
            const PolicyEval ev =
                policy_forward(agents.actors[static_cast<std::size_t>(i)],
                               obs[static_cast<std::size_t>(i)]);
            a = argmax_index(ev.probs);
          }
          joint[static_cast<std::size_t>(i)] = action_from_index(a, env_cfg.k_slots);
        }
      }

      for (int i = 0; i < n; ++i) {
        if (!joint[static_cast<std::size_t>(i)].has_value()) continue;
        m.active_steps[static_cast<std::size_t>(i)] += 1;
        m.action_counts[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(action_to_index(*joint[static_cast<std::size_t>(i)]))] += 1;
      }

      const StepResult res = env.step(joint);
      obs = res.observations;
      ep_return += res.team_reward;
      for (int i = 0; i < n; ++i) {
        for (const auto& ev : res.events[static_cast<std::size_t>(i)]) {
          switch (ev.type) {
            case EventType::captured:
              recount += ev.reward;
              unique_captures += 1;
              m.unique_captures_per_agent[static_cast<std::size_t>(i)] += 1;
              m.capture_counts[{i, ev.target_id}] += 1;
              break;
            case EventType::duplicate:
            case EventType::wasted_duplicate:
              m.capture_counts[{i, ev.target_id}] += 1;
              break;
            case EventType::failed:
              m.total_failures += 1;
              break;
            case EventType::wasted_capture:
              break;
          }
        }
      }
    }

    returns.push_back(ep_return);
    capture_reward_sum += env.capture_reward_total();

    const double err = std::abs(recount - env.capture_reward_total());
    m.max_recount_error = std::max(m.max_recount_error, err);
    if (err > 1e-9 || env.capture_reward_total() > env.sum_priorities() + 1e-9) {
      m.uniqueness_ok = false;
    }
  }

  double sum = 0.0;
  for (double r : returns) sum += r;
  m.mean_return = sum / static_cast<double>(n_episodes);
  double var = 0.0;
  for (double r : returns) var += (r - m.mean_return) * (r - m.mean_return);
  m.std_return = std::sqrt(var / static_cast<double>(n_episodes));
  m.mean_unique_captures = static_cast<double>(unique_captures) / static_cast<double>(n_episodes);
  m.mean_capture_reward = capture_reward_sum / static_cast<double>(n_episodes);
  return m;
}

}  // namespace satmarl
