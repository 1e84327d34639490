#pragma once

// Clipped-surrogate PPO loss with value and entropy terms, plus exact
// gradients via the tape.

#include <Eigen/Core>

#include "satmarl/nn.hpp"
#include "satmarl/rollout.hpp"

namespace satmarl {

struct PpoBatch {
  Eigen::MatrixXd actor_obs;   // M x actor_input_dim
  Eigen::MatrixXd critic_obs;  // M x critic_input_dim
  Eigen::MatrixXi actions;     // M x n_heads
  Eigen::VectorXd old_logp;    // M
  Eigen::VectorXd advantages;  // M, normalized by the caller
  Eigen::VectorXd returns;     // M, value targets
};

struct PpoDiagnostics {
  double total_loss = 0.0;
  double surrogate = 0.0;   // clipped surrogate mean (to be maximized)
  double value_loss = 0.0;  // mean squared error
  double entropy = 0.0;     // mean policy entropy
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// total = -surrogate + c1*value_loss - c2*entropy. Either network may be
// null, dropping its term(s): actor-only gives -surrogate - c2*entropy,
// critic-only gives c1*value_loss. Throws NumericError when the loss is
// non-finite; gradients are only written for requested, non-null networks.
PpoDiagnostics ppo_loss(const PpoBatch& batch, const ParamVector* actor,
                        const ParamVector* critic, const TrainConfig& cfg,
                        Eigen::VectorXd* actor_grad = nullptr,
                        Eigen::VectorXd* critic_grad = nullptr);

}  // namespace satmarl
