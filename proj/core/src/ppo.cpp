#include "satmarl/ppo.hpp"

#include <cmath>

#include "satmarl/tape.hpp"

namespace satmarl {

PpoDiagnostics ppo_loss(const PpoBatch& batch, const ParamVector* actor,
                        const ParamVector* critic, const TrainConfig& cfg,
                        Eigen::VectorXd* actor_grad, Eigen::VectorXd* critic_grad) {
  if (actor == nullptr && critic == nullptr) {
    throw ContractError("ppo_loss: at least one network required");
  }
  const Eigen::Index m = batch.actions.rows();
  if (m == 0) throw ContractError("ppo_loss: empty batch");

  Tape tape;
  PpoDiagnostics diag;
  Tape::Id total = -1;

  int actor_binding = -1, critic_binding = -1;
  if (actor != nullptr) {
    if (batch.actor_obs.rows() != m || batch.old_logp.size() != m ||
        batch.advantages.size() != m) {
      throw ContractError("ppo_loss: actor batch length mismatch");
    }
    actor_binding = tape.bind(*actor);
    const auto logits = tape.mlp(tape.input(batch.actor_obs), actor_binding);
    const auto logp = tape.log_prob(logits, batch.actions, actor->spec.n_heads);
    const auto ratio = tape.exp_(tape.sub(logp, tape.input(batch.old_logp)));
    const auto adv = tape.input(batch.advantages);
    const auto unclipped = tape.mul(ratio, adv);
    const auto clipped =
        tape.mul(tape.clip(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps), adv);
    const auto surrogate = tape.mean(tape.min_(unclipped, clipped));
    const auto entropy = tape.mean(tape.entropy(logits, actor->spec.n_heads));

    diag.surrogate = tape.scalar(surrogate);
    diag.entropy = tape.scalar(entropy);
    const auto& r = tape.value(ratio);
    Eigen::Index clipped_count = 0;
    double kl = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ri = r(i, 0);
      if (std::abs(ri - 1.0) > cfg.clip_eps) ++clipped_count;
      kl += (ri - 1.0) - std::log(ri);
    }
    diag.clip_fraction = static_cast<double>(clipped_count) / static_cast<double>(m);
    diag.approx_kl = kl / static_cast<double>(m);

    total = tape.add(tape.scale(surrogate, -1.0), tape.scale(entropy, -cfg.entropy_coef));
  }

  if (critic != nullptr) {
    if (batch.critic_obs.rows() != m || batch.returns.size() != m) {
      throw ContractError("ppo_loss: critic batch length mismatch");
    }
    critic_binding = tape.bind(*critic);
    const auto v = tape.mlp(tape.input(batch.critic_obs), critic_binding);
    const auto value_loss = tape.mean(tape.square(tape.sub(v, tape.input(batch.returns))));
    diag.value_loss = tape.scalar(value_loss);
    const auto term = tape.scale(value_loss, cfg.value_coef);
    total = total < 0 ? term : tape.add(total, term);
  }

  diag.total_loss = tape.scalar(total);
  if (!std::isfinite(diag.total_loss)) {
    throw NumericError("ppo_loss: non-finite loss, update aborted");
  }

  if (actor_grad != nullptr || critic_grad != nullptr) {
    tape.backward(total);
    if (actor_grad != nullptr && actor_binding >= 0) *actor_grad = tape.grad(actor_binding);
    if (critic_grad != nullptr && critic_binding >= 0) *critic_grad = tape.grad(critic_binding);
  }
  return diag;
}

}  // namespace satmarl
