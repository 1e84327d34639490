// Acceptance suite: one self-contained check per shipped guarantee, one
// pass/fail line each. Run all, or a single one with --only N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "satmarl/evaluate.hpp"
#include "satmarl/experiment.hpp"
#include "satmarl/scenarios.hpp"

using namespace satmarl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- shared

PpoBatch random_batch(Eigen::Index m, const MlpSpec& actor, const MlpSpec& critic, Rng& rng) {
  PpoBatch b;
  b.actor_obs.resize(m, actor.input_dim);
  b.critic_obs.resize(m, critic.input_dim);
  b.actions.resize(m, actor.n_heads);
  b.old_logp.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int j = 0; j < actor.input_dim; ++j) b.actor_obs(i, j) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < critic.input_dim; ++j) b.critic_obs(i, j) = rng.uniform(-1.0, 1.0);
    for (int h = 0; h < actor.n_heads; ++h) b.actions(i, h) = rng.uniform_int(actor.n_actions);
    b.old_logp[i] = -std::log(static_cast<double>(actor.n_actions)) * actor.n_heads +
                    rng.uniform(-0.3, 0.3);
    b.advantages[i] = rng.uniform(-2.0, 2.0);
    b.returns[i] = rng.uniform(-2.0, 2.0);
  }
  return b;
}

Target equator_target(int id, double lon_rad, double priority) {
  return Target{id, GroundPoint{0.0, lon_rad}, priority, {}};
}

ExperimentConfig reduced_scenario(const std::string& name) {
  ExperimentConfig exp = make_scenario(name);
  exp.env.n_targets = 200;
  exp.env.horizon_orbits = 1.0;
  exp.train.total_env_steps = 20000;
  exp.seeds = {1, 2, 3, 4, 5};
  exp.train.seeds = exp.seeds;
  return exp;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
      double less = 0, equal = 0;
      for (int j = 0; j < n; ++j) {
        if (v[j] < v[i]) less += 1;
        if (v[j] == v[i]) equal += 1;
      }
      r[i] = less + (equal + 1) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double cov = 0, vx = 0, vy = 0;
  for (int i = 0; i < n; ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

// --------------------------------------------------------- criterion 1

// Analytic gradients of the full PPO total loss vs central finite
// differences (h = 1e-5), 20 random nets, max relative error < 1e-4,
// under 30 seconds.
Outcome criterion_gradient_oracle() {
  const double t0 = now_s();
  Rng rng(0xACCE1);
  TrainConfig cfg;
  const double h = 1e-5;
  double worst = 0.0;

  for (int net = 0; net < 20; ++net) {
    MlpSpec aspec;
    aspec.input_dim = 3 + rng.uniform_int(6);
    aspec.hidden = {4 + rng.uniform_int(9)};
    aspec.head = HeadKind::categorical;
    aspec.n_actions = 2 + rng.uniform_int(4);
    MlpSpec cspec;
    cspec.input_dim = aspec.input_dim;
    cspec.hidden = aspec.hidden;
    cspec.head = HeadKind::scalar;

    ParamVector actor = init_params(aspec, rng.next_u64());
    ParamVector critic = init_params(cspec, rng.next_u64());
    const PpoBatch batch = random_batch(6, aspec, cspec, rng);

    Eigen::VectorXd actor_grad, critic_grad;
    ppo_loss(batch, &actor, &critic, cfg, &actor_grad, &critic_grad);

    auto fd_check = [&](ParamVector& target, const Eigen::VectorXd& analytic) {
      for (Eigen::Index k = 0; k < target.data.size(); ++k) {
        const double saved = target.data[k];
        target.data[k] = saved + h;
        const double up = ppo_loss(batch, &actor, &critic, cfg).total_loss;
        target.data[k] = saved - h;
        const double dn = ppo_loss(batch, &actor, &critic, cfg).total_loss;
        target.data[k] = saved;
        const double fd = (up - dn) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(fd), std::abs(analytic[k])});
        worst = std::max(worst, std::abs(fd - analytic[k]) / scale);
      }
    };
    fd_check(actor, actor_grad);
    fd_check(critic, critic_grad);
  }

  const double elapsed = now_s() - t0;
  return {worst < 1e-4 && elapsed < 30.0,
          "max rel err " + fmt(worst) + " (< 1e-4), " + fmt(elapsed) + " s (< 30 s)"};
}

// --------------------------------------------------------- criterion 2

// Recursive GAE vs the brute-force double sum, 1000 random sequences.
Outcome criterion_gae_oracle() {
  Rng rng(0xACCE2);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int t_len = 1 + rng.uniform_int(16);
    Eigen::VectorXd rewards(t_len), values(t_len + 1), dones(t_len);
    for (int i = 0; i < t_len; ++i) {
      rewards[i] = rng.uniform(-3.0, 3.0);
      dones[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
    }
    for (int i = 0; i <= t_len; ++i) values[i] = rng.uniform(-3.0, 3.0);
    const double gamma = rng.uniform();
    const double lambda = rng.uniform();

    const GaeResult fast = compute_gae(rewards, values, dones, gamma, lambda);
    for (int t = 0; t < t_len; ++t) {
      double acc = 0.0, weight = 1.0;
      for (int k = t; k < t_len; ++k) {
        acc += weight * (rewards[k] + gamma * values[k + 1] * (1.0 - dones[k]) - values[k]);
        weight *= gamma * lambda * (1.0 - dones[k]);
        if (weight == 0.0) break;
      }
      worst = std::max(worst, std::abs(fast.advantages[t] - acc));
    }
  }
  return {worst < 1e-10, "max |recursive - double sum| " + fmt(worst) + " (< 1e-10)"};
}

// --------------------------------------------------------- criterion 3

// Scripted episodes: rho_j exactly once constellation-wide, -100 exactly at
// the failing step, 0 otherwise; event-log recount matches to 1e-9.
Outcome criterion_reward_conformance() {
  std::ostringstream detail;
  bool ok = true;

  // (a) Single satellite, two targets: each scores its priority once, all
  //     other steps score 0; later duplicates are impossible for itself.
  {
    EnvConfig cfg;
    cfg.constellation.n_sats = 1;
    cfg.constellation.inclination_rad = 0.0;
    cfg.n_targets = 2;
    cfg.horizon_orbits = 1.0;
    cfg.dt_s = 10.0;
    cfg.master_seed = 1;
    Env env(cfg);
    env.reset_with_targets(0, {equator_target(0, 0.7, 0.65), equator_target(1, 1.4, 0.25)});

    double total = 0.0, recount = 0.0;
    int scored_steps = 0;
    while (!env.done()) {
      const auto slots = env.upcoming_targets(0, env.time_s(), cfg.k_slots);
      const bool due = slots[0].target_id >= 0 &&
                       slots[0].start_s <= env.time_s() + cfg.dt_s &&
                       slots[0].end_s > env.time_s() + cfg.dt_s;
      const auto res = env.step({due ? Action::make_capture(0) : Action::make_charge()});
      total += res.team_reward;
      for (const auto& ev : res.events[0]) {
        if (ev.type == EventType::captured) recount += ev.reward;
      }
      if (res.team_reward != 0.0) {
        scored_steps += 1;
        ok = ok && (res.team_reward == 0.65 || res.team_reward == 0.25);
      }
    }
    ok = ok && scored_steps == 2 && std::abs(total - 0.9) < 1e-9 &&
         std::abs(recount - env.capture_reward_total()) < 1e-9;
    detail << "two-target sweep total " << fmt(total) << " (expect 0.9)";
  }

  // (b) Same-step duplicate: one reward, lowest index scores.
  {
    EnvConfig cfg;
    cfg.constellation.n_sats = 2;
    cfg.constellation.inclination_rad = 0.0;
    cfg.constellation.cluster_spacing_rad = 1e-9;
    cfg.n_targets = 1;
    cfg.horizon_orbits = 1.0;
    cfg.dt_s = 10.0;
    cfg.master_seed = 1;
    Env env(cfg);
    env.reset_with_targets(0, {equator_target(0, 0.7, 0.4)});
    double total = 0.0;
    bool tie_seen = false;
    while (!env.done()) {
      const auto slots = env.upcoming_targets(0, env.time_s(), cfg.k_slots);
      const bool due = slots[0].target_id == 0 &&
                       slots[0].start_s <= env.time_s() + cfg.dt_s &&
                       slots[0].end_s > env.time_s() + cfg.dt_s;
      const Action act = due ? Action::make_capture(0) : Action::make_charge();
      const auto res = env.step({act, act});
      total += res.team_reward;
      if (due && !tie_seen) {
        tie_seen = true;
        ok = ok && std::abs(res.team_reward - 0.4) < 1e-12;
        ok = ok && env.targets()[0].captured_by.has_value() &&
             env.targets()[0].captured_by->first == 0;
        break;
      }
    }
    ok = ok && tie_seen;
    detail << "; tie scored once (0.4)";
  }

  // (c) Battery empty and wheel saturation each pay exactly -100 at the
  //     failing step and deactivate the agent.
  {
    EnvConfig cfg;
    cfg.constellation.n_sats = 2;
    cfg.constellation.cluster_spacing_rad = 1e-9;
    cfg.n_targets = 5;
    cfg.horizon_orbits = 0.5;
    cfg.master_seed = 2;
    Env env(cfg);
    env.reset(0);

    ResourceState drained = env.resources(0);
    drained.battery_wh = 0.4;  // desaturate costs 0.7: clamps to zero
    env.set_resources(0, drained);
    ResourceState saturated = env.resources(1);
    saturated.rw_rpm = Eigen::Vector3d(0.0, env.params(1).omega_max_rpm, 0.0);
    env.set_resources(1, saturated);

    const auto res = env.step({Action::make_desaturate(), Action::make_charge()});
    ok = ok && std::abs(res.team_reward + 200.0) < 1e-9;  // both fail this step
    ok = ok && res.done;                                  // all agents inactive
    ok = ok && env.resources(0).battery_wh == 0.0;
    detail << "; dual failure step -200";
  }
  return {ok, detail.str()};
}

// --------------------------------------------------------- criterion 4

// 1e5 random-action steps across 100 random configurations never leave the
// resource bounds or produce non-finite state.
Outcome criterion_resource_invariants() {
  Rng rng(0xACCE4);
  long steps_done = 0;
  double obs_min = 0.0, obs_max = 0.0;
  for (int c = 0; c < 100; ++c) {
    EnvConfig cfg;
    cfg.constellation.kind = rng.uniform() < 0.5 ? ConstellationKind::cluster
                                                 : ConstellationKind::walker_delta;
    cfg.constellation.n_sats = 1 + rng.uniform_int(4);
    if (cfg.constellation.kind == ConstellationKind::walker_delta) {
      cfg.constellation.n_planes = cfg.constellation.n_sats % 2 == 0 ? 2 : 1;
      cfg.constellation.phasing_f = rng.uniform_int(3);
    }
    cfg.constellation.altitude_km = rng.uniform(450.0, 1200.0);
    cfg.constellation.inclination_rad = rng.uniform(0.0, kPi / 2);
    cfg.constellation.cluster_spacing_rad = rng.uniform(0.01, 4.0) * kPi / 180.0;
    cfg.n_targets = 20 + rng.uniform_int(80);
    cfg.horizon_orbits = rng.uniform(0.15, 0.4);
    cfg.dt_s = rng.uniform(30.0, 120.0);
    cfg.k_slots = 1 + rng.uniform_int(4);
    cfg.randomize.rw_init = rng.uniform() < 0.5;
    cfg.randomize.battery_init = rng.uniform() < 0.5;
    cfg.randomize.storage_init = rng.uniform() < 0.5;
    cfg.randomize.disturbance = rng.uniform() < 0.5;
    cfg.master_seed = rng.next_u64();
    SatelliteParams p;
    p.b_max_wh = rng.uniform(20.0, 400.0);
    p.d_max_gb = rng.uniform(1.0, 500.0);
    p.image_size_gb = rng.uniform(0.2, 2.5);
    p.baud_gb_per_step = rng.uniform(0.01, 0.5);
    p.charge_gain_wh = rng.uniform(1.0, 6.0);
    p.slew_rpm_min = rng.uniform(0.0, 300.0);
    p.slew_rpm_max = p.slew_rpm_min + rng.uniform(0.0, 400.0);
    cfg.sat_params = {p};

    Env env(cfg);
    env.reset(rng.next_u64());
    for (int t = 0; t < 1000; ++t) {
      if (env.done()) env.reset(rng.next_u64());
      std::vector<std::optional<Action>> joint;
      for (int i = 0; i < env.n_sats(); ++i) {
        if (env.active()[static_cast<std::size_t>(i)]) {
          joint.emplace_back(action_from_index(rng.uniform_int(env.action_space()), cfg.k_slots));
        } else {
          joint.emplace_back(std::nullopt);
        }
      }
      const auto res = env.step(joint);
      ++steps_done;
      for (int i = 0; i < env.n_sats(); ++i) {
        const auto& r = env.resources(i);
        if (!(r.battery_wh >= 0.0 && r.battery_wh <= p.b_max_wh && r.storage_gb >= 0.0 &&
              r.storage_gb <= p.d_max_gb && std::isfinite(r.rw_rpm.sum()))) {
          return {false, "resource bound violated in config " + std::to_string(c)};
        }
        obs_min = std::min(obs_min, res.observations[static_cast<std::size_t>(i)].minCoeff());
        obs_max = std::max(obs_max, res.observations[static_cast<std::size_t>(i)].maxCoeff());
      }
    }
  }
  const bool ok = steps_done == 100000 && obs_min >= -1.0 && obs_max <= 1.0;
  return {ok, std::to_string(steps_done) + " steps, obs range [" + fmt(obs_min) + ", " +
                  fmt(obs_max) + "]"};
}

// --------------------------------------------------------- criterion 5

// Identical config + seeds give bit-identical learning-curve CSVs for
// every algorithm.
Outcome criterion_determinism() {
  const fs::path root = fs::temp_directory_path() / "satmarl_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  std::string failed;
  for (const std::string algo : {"ppo", "central_ppo", "ippo", "mappo", "happo"}) {
    const int n_sats = algo == "ppo" ? 1 : 2;
    auto config_text = [&](const std::string& dir) {
      std::ostringstream os;
      os << "name = \"det\"\nalgorithm = \"" << algo << "\"\nseeds = [1, 2]\noutput_dir = \""
         << dir << "\"\n[env]\nn_sats = " << n_sats
         << "\nn_targets = 30\nhorizon_orbits = 0.15\nmaster_seed = 9\n[train]\n"
         << "total_env_steps = 45\nhidden = [8, 8]\n";
      return os.str();
    };
    std::string curves[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / (algo + "_" + std::to_string(run));
      const fs::path cfg_path = root / (algo + std::to_string(run) + ".ini");
      std::ofstream(cfg_path) << config_text(dir.string());
      std::ostringstream err;
      if (cmd_train(cfg_path.string(), err) != kExitOk) {
        fs::remove_all(root);
        return {false, algo + " run failed: " + err.str()};
      }
      std::ifstream is(dir / "learning_curve.csv", std::ios::binary);
      std::ostringstream os;
      os << is.rdbuf();
      curves[run] = os.str();
    }
    if (curves[0] != curves[1] || curves[0].empty()) failed += algo + " ";
  }
  fs::remove_all(root);
  if (!failed.empty()) return {false, "curves differ for: " + failed};
  return {true, "bit-identical curves for all 5 algorithms"};
}

// --------------------------------------------------------- criterion 6

// Geometry oracles: Kepler period, positional periodicity, eclipse truth
// table.
Outcome criterion_geometry() {
  bool ok = true;
  std::ostringstream detail;

  double worst_period = 0.0;
  Rng rng(0xACCE6);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(6500.0, 45000.0);
    const double direct = kTwoPi * std::sqrt(a * a * a / kMuEarth);
    worst_period = std::max(worst_period,
                            std::abs(orbital_period_s(a) - direct) / direct);
  }
  ok = ok && worst_period < 1e-6;
  detail << "period err " << fmt(worst_period);

  double worst_periodicity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const OrbitalElements el{rng.uniform(6700.0, 9000.0), rng.uniform(0.0, kPi),
                             rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
    const double t = rng.uniform(0.0, 3.0 * orbital_period_s(el.semi_major_axis_km));
    const auto a = propagate_circular(el, t);
    const auto b = propagate_circular(el, t + orbital_period_s(el.semi_major_axis_km));
    worst_periodicity = std::max(
        worst_periodicity, (a.position_km - b.position_km).norm() / el.semi_major_axis_km);
  }
  ok = ok && worst_periodicity < 1e-9;
  detail << ", periodicity err " << fmt(worst_periodicity);

  const Vec3 sun(1.0, 0.0, 0.0);
  const bool eclipse_ok = !in_eclipse(7000.0 * sun, sun) &&        // sun side
                          in_eclipse(-7000.0 * sun, sun) &&        // anti-sun, in cylinder
                          !in_eclipse(Vec3(0.0, 7000.0, 0.0), sun) &&  // perpendicular
                          !in_eclipse(Vec3(0.0, 0.0, 7000.0), sun) &&
                          in_eclipse(Vec3(-8000.0, 6000.0, 0.0), sun) &&
                          !in_eclipse(Vec3(-8000.0, 6800.0, 0.0), sun);
  ok = ok && eclipse_ok;
  detail << ", eclipse table " << (eclipse_ok ? "exact" : "WRONG");
  return {ok, detail.str()};
}

// --------------------------------------------------------- criterion 7

// Reduced single_default: PPO at 20k env steps over 5 seeds reaches at
// least twice the random baseline's unique-capture reward with zero
// failure penalties in the final 10 evaluation episodes.
Outcome criterion_single_satellite_learning() {
  const double t0 = now_s();
  const ExperimentConfig exp = reduced_scenario("single_default");

  double trained_sum = 0.0, random_sum = 0.0;
  int failures = 0;
  for (const std::uint64_t seed : exp.seeds) {
    const TrainResult res = train(Algorithm::ppo, exp.env, exp.train, seed);
    if (res.aborted) return {false, "training aborted: " + res.abort_reason};
    const EvalMetrics trained =
        evaluate(res.agents, exp.env, 10, 900 + seed, EvalPolicy::greedy);
    const EvalMetrics baseline =
        evaluate(res.agents, exp.env, 10, 900 + seed, EvalPolicy::random);
    if (!trained.uniqueness_ok || !baseline.uniqueness_ok) {
      return {false, "uniqueness audit failed during evaluation"};
    }
    trained_sum += trained.mean_capture_reward;
    random_sum += baseline.mean_capture_reward;
    failures += trained.total_failures;
  }
  const double ratio = trained_sum / random_sum;
  const double elapsed = now_s() - t0;
  const bool ok = ratio >= 2.0 && failures == 0;
  return {ok, "capture reward ratio " + fmt(ratio) + " (>= 2), eval failures " +
                  std::to_string(failures) + " (= 0), " + fmt(elapsed) + " s"};
}

// --------------------------------------------------------- criterion 8

// Reduced cluster4_limited: seed-mean final return of MAPPO >= centralised
// PPO, and IPPO not more than 20% below MAPPO.
Outcome criterion_algorithm_ordering() {
  const double t0 = now_s();
  const ExperimentConfig exp = reduced_scenario("cluster4_limited");

  auto final_mean = [&](Algorithm algo) {
    double sum = 0.0;
    for (const std::uint64_t seed : exp.seeds) {
      const TrainResult res = train(algo, exp.env, exp.train, seed);
      const EvalMetrics m = evaluate(res.agents, exp.env, 10, 7000 + seed, EvalPolicy::greedy);
      sum += m.mean_return;
    }
    return sum / static_cast<double>(exp.seeds.size());
  };

  const double mappo = final_mean(Algorithm::mappo);
  const double central = final_mean(Algorithm::central_ppo);
  const double ippo = final_mean(Algorithm::ippo);
  const double elapsed = now_s() - t0;

  const bool order_ok = mappo >= central;
  const bool ippo_ok = ippo >= mappo - 0.2 * std::abs(mappo);
  return {order_ok && ippo_ok,
          "MAPPO " + fmt(mappo) + " >= central " + fmt(central) + " : " +
              (order_ok ? "yes" : "NO") + "; IPPO " + fmt(ippo) + " within 20%: " +
              (ippo_ok ? "yes" : "NO") + ", " + fmt(elapsed) + " s"};
}

// --------------------------------------------------------- criterion 9

// Reduced cluster4_hetero_storage with trained MAPPO: per-agent unique
// captures rank-correlate positively with storage capacity on seed means.
Outcome criterion_storage_coordination() {
  const double t0 = now_s();
  const ExperimentConfig exp = reduced_scenario("cluster4_hetero_storage");

  std::vector<double> mean_caps(4, 0.0);
  for (const std::uint64_t seed : exp.seeds) {
    const TrainResult res = train(Algorithm::mappo, exp.env, exp.train, seed);
    const EvalMetrics m = evaluate(res.agents, exp.env, 10, 7000 + seed, EvalPolicy::greedy);
    if (!m.uniqueness_ok) return {false, "uniqueness audit failed during evaluation"};
    for (int i = 0; i < 4; ++i) {
      mean_caps[static_cast<std::size_t>(i)] +=
          static_cast<double>(m.unique_captures_per_agent[static_cast<std::size_t>(i)]) /
          static_cast<double>(exp.seeds.size());
    }
  }
  std::vector<double> storage;
  for (const auto& p : exp.env.sat_params) storage.push_back(p.d_max_gb);
  const double rho = spearman(storage, mean_caps);
  const double elapsed = now_s() - t0;
  std::ostringstream caps;
  for (double c : mean_caps) caps << fmt(c) << " ";
  return {rho > 0.0, "seed-mean captures (" + caps.str() + "), spearman " + fmt(rho) +
                         " (> 0), " + fmt(elapsed) + " s"};
}

// -------------------------------------------------------- criterion 10

// No policy, trained or random, accumulates capture reward above the
// episode's total priority mass; the audit runs inside every evaluation.
Outcome criterion_uniqueness_bound() {
  ExperimentConfig exp = make_scenario("cluster4_default");
  exp.env.n_targets = 120;
  exp.env.horizon_orbits = 0.5;
  exp.train.total_env_steps = 2000;

  Env env(exp.env);
  env.reset(0);
  const double rho_sum = env.sum_priorities();

  // Random policy.
  const AgentSet fresh = make_agent_set(Algorithm::mappo, env, exp.train, 3);
  const EvalMetrics rnd = evaluate(fresh, exp.env, 8, 41, EvalPolicy::random);

  // Briefly trained policy.
  const TrainResult res = train(Algorithm::mappo, exp.env, exp.train, 3);
  const EvalMetrics trained = evaluate(res.agents, exp.env, 8, 42, EvalPolicy::greedy);

  const bool ok = rnd.uniqueness_ok && trained.uniqueness_ok &&
                  rnd.max_recount_error < 1e-9 && trained.max_recount_error < 1e-9 &&
                  rnd.mean_capture_reward < rho_sum && trained.mean_capture_reward < rho_sum;
  return {ok, "audits clean, capture reward " + fmt(trained.mean_capture_reward) +
                  " < priority mass " + fmt(rho_sum)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::vector<Criterion> criteria = {
      {1, "PPO gradient oracle", criterion_gradient_oracle},
      {2, "GAE brute-force oracle", criterion_gae_oracle},
      {3, "reward/failure conformance", criterion_reward_conformance},
      {4, "resource invariants", criterion_resource_invariants},
      {5, "bit-identical determinism", criterion_determinism},
      {6, "geometry oracles", criterion_geometry},
      {7, "single-satellite learning", criterion_single_satellite_learning},
      {8, "algorithm ordering", criterion_algorithm_ordering},
      {9, "storage coordination", criterion_storage_coordination},
      {10, "uniqueness upper bound", criterion_uniqueness_bound},
  };

  bool all_ok = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": "
              << c.name << " -- " << outcome.detail << std::endl;
    all_ok = all_ok && outcome.pass;
  }
  return all_ok ? 0 : 1;
}
