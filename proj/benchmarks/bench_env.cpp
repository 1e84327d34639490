#include <benchmark/benchmark.h>

#include "satmarl/env.hpp"

namespace {

satmarl::EnvConfig cluster4_cfg(int n_targets) {
  satmarl::EnvConfig cfg;
  cfg.constellation.kind = satmarl::ConstellationKind::cluster;
  cfg.constellation.n_sats = 4;
  cfg.n_targets = n_targets;
  return cfg;
}

void EnvReset(benchmark::State& state) {
  satmarl::Env env(cluster4_cfg(static_cast<int>(state.range(0))));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.reset(seed++));
  }
}
BENCHMARK(EnvReset)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void EnvStepRandom(benchmark::State& state) {
  satmarl::Env env(cluster4_cfg(2000));
  env.reset(1);
  satmarl::Rng rng(7);
  for (auto _ : state) {
    if (env.done()) env.reset(rng.next_u64());
    std::vector<std::optional<satmarl::Action>> joint;
    for (int i = 0; i < env.n_sats(); ++i) {
      if (env.active()[static_cast<std::size_t>(i)]) {
        joint.push_back(satmarl::action_from_index(rng.uniform_int(env.action_space()),
                                                   env.config().k_slots));
      } else {
        joint.push_back(std::nullopt);
      }
    }
    benchmark::DoNotOptimize(env.step(joint));
  }
}
BENCHMARK(EnvStepRandom)->Unit(benchmark::kMicrosecond);

}  // namespace
