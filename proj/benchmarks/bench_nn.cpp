#include <benchmark/benchmark.h>

#include "satmarl/ppo.hpp"

namespace {

satmarl::PpoBatch random_batch(int m, int obs_dim, int n_actions, satmarl::Rng& rng) {
  satmarl::PpoBatch b;
  b.actor_obs.resize(m, obs_dim);
  b.critic_obs.resize(m, obs_dim);
  b.actions.resize(m, 1);
  b.old_logp.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < obs_dim; ++j) {
      b.actor_obs(i, j) = rng.uniform(-1.0, 1.0);
      b.critic_obs(i, j) = b.actor_obs(i, j);
    }
    b.actions(i, 0) = rng.uniform_int(n_actions);
    b.old_logp[i] = -std::log(static_cast<double>(n_actions)) + rng.uniform(-0.1, 0.1);
    b.advantages[i] = rng.uniform(-1.0, 1.0);
    b.returns[i] = rng.uniform(-1.0, 1.0);
  }
  return b;
}

void PpoLossGrad(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  satmarl::Rng rng(11);
  satmarl::MlpSpec actor_spec{18, {64, 64}, satmarl::HeadKind::categorical, 6, 1};
  satmarl::MlpSpec critic_spec{18, {64, 64}, satmarl::HeadKind::scalar, 1, 1};
  const auto actor = satmarl::init_params(actor_spec, 1);
  const auto critic = satmarl::init_params(critic_spec, 2);
  const auto batch = random_batch(m, 18, 6, rng);
  satmarl::TrainConfig cfg;
  Eigen::VectorXd ag, cg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(satmarl::ppo_loss(batch, &actor, &critic, cfg, &ag, &cg));
  }
}
BENCHMARK(PpoLossGrad)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void PolicyForward(benchmark::State& state) {
  satmarl::MlpSpec spec{18, {64, 64}, satmarl::HeadKind::categorical, 6, 1};
  const auto params = satmarl::init_params(spec, 3);
  Eigen::VectorXd obs = Eigen::VectorXd::Constant(18, 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(satmarl::policy_forward(params, obs));
  }
}
BENCHMARK(PolicyForward)->Unit(benchmark::kNanosecond);

}  // namespace
