#include "satmarl/env.hpp"

#include <algorithm>
#include <cmath>

namespace satmarl {

std::vector<GroundPoint> default_ground_stations() {
  // Svalbard, Canberra, Santiago.
  return {
      {deg2rad(78.2), deg2rad(15.4)},
      {deg2rad(-35.3), deg2rad(149.1)},
      {deg2rad(-33.4), deg2rad(-70.6)},
  };
}

std::vector<Target> generate_targets(int n, Rng& rng) {
  if (n < 1) throw ContractError("generate_targets: n must be >= 1");
  std::vector<Target> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Target t;
    t.id = i;
    t.point.lon_rad = rng.uniform(-kPi, kPi);
    t.point.lat_rad = std::asin(rng.uniform(-1.0, 1.0));
    t.priority = rng.uniform();
    out.push_back(t);
  }
  return out;
}

int observation_length(int k_slots) { return 9 + 3 * k_slots; }

namespace {

void validate_params(const SatelliteParams& p) {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!(nonneg(p.b_min_wh) && nonneg(p.b_max_wh) && nonneg(p.d_max_gb) &&
        nonneg(p.omega_max_rpm) && nonneg(p.base_draw_wh) && nonneg(p.capture_cost_wh) &&
        nonneg(p.downlink_cost_wh) && nonneg(p.desat_cost_wh) && nonneg(p.charge_gain_wh) &&
        nonneg(p.image_size_gb) && nonneg(p.baud_gb_per_step) && nonneg(p.slew_rpm_min) &&
        nonneg(p.slew_rpm_max) && nonneg(p.desat_rate_rpm))) {
    throw ConfigError("satellite params must be finite and nonnegative");
  }
  if (!(p.b_min_wh < p.b_max_wh)) throw ConfigError("b_min_wh must be < b_max_wh");
  if (p.slew_rpm_min > p.slew_rpm_max) throw ConfigError("slew_rpm_min must be <= slew_rpm_max");
  if (p.disturbance_fail_prob < 0.0 || p.disturbance_fail_prob > 1.0) {
    throw ConfigError("disturbance_fail_prob must be in [0, 1]");
  }
}

void validate_ground_point(const GroundPoint& gp) {
  if (gp.lat_rad < -kPi / 2 || gp.lat_rad > kPi / 2 || gp.lon_rad < -kPi || gp.lon_rad >= kPi) {
    throw ConfigError("ground point out of bounds");
  }
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

void validate_config(const EnvConfig& cfg) {
  if (cfg.n_targets < 1) throw ConfigError("n_targets must be >= 1");
  if (cfg.k_slots < 1) throw ConfigError("k_slots must be >= 1");
  if (!(cfg.dt_s > 0.0)) throw ConfigError("dt_s must be > 0");
  if (!(cfg.horizon_orbits > 0.0)) throw ConfigError("horizon_orbits must be > 0");
  const int n = cfg.constellation.n_sats;
  if (cfg.sat_params.empty() ||
      (cfg.sat_params.size() != 1 && cfg.sat_params.size() != static_cast<std::size_t>(n))) {
    throw ConfigError("sat_params must have size 1 or n_sats");
  }
  for (const auto& p : cfg.sat_params) validate_params(p);
  for (const auto& gp : cfg.ground_stations) validate_ground_point(gp);
  if (cfg.target_elev_min_rad <= 0.0 || cfg.target_elev_min_rad >= kPi / 2) {
    throw ConfigError("target_elev_min_rad must be in (0, pi/2)");
  }
  if (cfg.gs_elev_min_rad <= 0.0 || cfg.gs_elev_min_rad >= kPi / 2) {
    throw ConfigError("gs_elev_min_rad must be in (0, pi/2)");
  }
  if (cfg.disturbance_fail_prob < 0.0 || cfg.disturbance_fail_prob > 1.0) {
    throw ConfigError("disturbance_fail_prob must be in [0, 1]");
  }
  make_constellation(cfg.constellation);  // throws on invalid spec
}

Env::Env(EnvConfig cfg) : cfg_(std::move(cfg)) {
  validate_config(cfg_);
  const int n = cfg_.constellation.n_sats;

  params_.assign(static_cast<std::size_t>(n),
                 cfg_.sat_params.size() == 1 ? cfg_.sat_params[0] : SatelliteParams{});
  if (cfg_.sat_params.size() != 1) params_ = cfg_.sat_params;
  for (auto& p : params_) {
    p.disturbance_fail_prob = cfg_.randomize.disturbance ? cfg_.disturbance_fail_prob : 0.0;
  }

  elements_ = make_constellation(cfg_.constellation);
  period_s_ = orbital_period_s(kEarthRadiusKm + cfg_.constellation.altitude_km);
  horizon_steps_ = static_cast<int>(std::ceil(cfg_.horizon_orbits * period_s_ / cfg_.dt_s));
  lookahead_steps_ = static_cast<int>(std::ceil(period_s_ / cfg_.dt_s));
  total_steps_ = horizon_steps_ + lookahead_steps_;

  precompute_geometry();
}

void Env::precompute_geometry() {
  const int n = n_sats();
  pos_eci_.assign(static_cast<std::size_t>(n), {});
  gs_visible_.assign(static_cast<std::size_t>(n), {});
  next_gs_step_.assign(static_cast<std::size_t>(n), {});

  for (int i = 0; i < n; ++i) {
    auto& eci = pos_eci_[static_cast<std::size_t>(i)];
    auto& gsv = gs_visible_[static_cast<std::size_t>(i)];
    eci.resize(static_cast<std::size_t>(total_steps_) + 1);
    gsv.resize(static_cast<std::size_t>(total_steps_) + 1);
    for (int s = 0; s <= total_steps_; ++s) {
      const double t = s * cfg_.dt_s;
      eci[static_cast<std::size_t>(s)] =
          propagate_circular(elements_[static_cast<std::size_t>(i)], t).position_km;
      const Vec3 ecef = eci_to_ecef(eci[static_cast<std::size_t>(s)], t);
      bool vis = false;
      for (const auto& gs : cfg_.ground_stations) {
        if (elevation_angle(gs, ecef) >= cfg_.gs_elev_min_rad) {
          vis = true;
          break;
        }
      }
      gsv[static_cast<std::size_t>(s)] = vis ? 1 : 0;
    }

    auto& nxt = next_gs_step_[static_cast<std::size_t>(i)];
    nxt.assign(static_cast<std::size_t>(total_steps_) + 1, -1);
    int next = -1;
    for (int s = total_steps_; s >= 0; --s) {
      if (gsv[static_cast<std::size_t>(s)]) next = s;
      nxt[static_cast<std::size_t>(s)] = next;
    }
  }
}

void Env::rebuild_target_windows() {
  const int n = n_sats();
  const double sin_min = std::sin(cfg_.target_elev_min_rad);
  const double sin2 = sin_min * sin_min;

  // Per-target ECEF site vectors (targets are Earth-fixed).
  std::vector<Vec3> site(targets_.size());
  for (std::size_t j = 0; j < targets_.size(); ++j) site[j] = ground_point_ecef(targets_[j].point);

  windows_.assign(static_cast<std::size_t>(n), {});
  visible_ids_.assign(static_cast<std::size_t>(n), {});

  // Satellite ECEF per step, shared across targets.
  std::vector<Vec3> sat_ecef(static_cast<std::size_t>(total_steps_) + 1);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s <= total_steps_; ++s) {
      sat_ecef[static_cast<std::size_t>(s)] =
          eci_to_ecef(pos_eci_[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)],
                      s * cfg_.dt_s);
    }
    auto& vis = visible_ids_[static_cast<std::size_t>(i)];
    vis.assign(static_cast<std::size_t>(total_steps_) + 1, {});
    auto& wins = windows_[static_cast<std::size_t>(i)];

    for (std::size_t j = 0; j < targets_.size(); ++j) {
      const Vec3 u = site[j] / kEarthRadiusKm;
      int run_start = -1;
      for (int s = 0; s <= total_steps_; ++s) {
        const Vec3 los = sat_ecef[static_cast<std::size_t>(s)] - site[j];
        const double d = u.dot(los);
        const bool visible = d >= 0.0 && d * d >= sin2 * los.squaredNorm();
        if (visible) {
          vis[static_cast<std::size_t>(s)].push_back(static_cast<int>(j));
          if (run_start < 0) run_start = s;
        } else if (run_start >= 0) {
          wins.push_back({run_start, s, static_cast<int>(j)});
          run_start = -1;
        }
      }
      if (run_start >= 0) wins.push_back({run_start, total_steps_ + 1, static_cast<int>(j)});
    }
    std::sort(wins.begin(), wins.end(), [](const WindowRec& a, const WindowRec& b) {
      return a.start_step != b.start_step ? a.start_step < b.start_step
                                          : a.target_id < b.target_id;
    });
  }
}

void Env::init_resources(Rng& rng) {
  const int n = n_sats();
  res_.assign(static_cast<std::size_t>(n), ResourceState{});
  for (int i = 0; i < n; ++i) {
    const auto& p = params_[static_cast<std::size_t>(i)];
    auto& r = res_[static_cast<std::size_t>(i)];
    r.battery_wh = (cfg_.randomize.battery_init ? rng.uniform(0.40, 0.80) : 0.5) * p.b_max_wh;
    r.storage_gb = (cfg_.randomize.storage_init ? rng.uniform(0.20, 0.80) : 0.0) * p.d_max_gb;
    if (cfg_.randomize.rw_init) {
      for (int k = 0; k < 3; ++k) r.rw_rpm[k] = rng.uniform(-3000.0, 3000.0);
    } else {
      r.rw_rpm.setZero();
    }
  }
}

std::vector<Observation> Env::reset(std::uint64_t episode_seed) {
  if (cfg_.fixed_targets.has_value()) {
    return reset_with_targets(episode_seed, *cfg_.fixed_targets);
  }
  Rng target_rng(mix_seed(cfg_.master_seed, mix_seed(episode_seed, 0x7a46)));
  return reset_with_targets(episode_seed, generate_targets(cfg_.n_targets, target_rng));
}

std::vector<Observation> Env::reset_with_targets(std::uint64_t episode_seed,
                                                 std::vector<Target> targets) {
  if (targets.empty()) throw ConfigError("reset_with_targets: empty target set");
  targets_ = std::move(targets);
  priority_sum_ = 0.0;
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    targets_[j].id = static_cast<int>(j);
    targets_[j].captured_by.reset();
    priority_sum_ += targets_[j].priority;
  }

  Rng init_rng(mix_seed(cfg_.master_seed, mix_seed(episode_seed, 0x9b1d)));
  init_resources(init_rng);
  step_rng_ = Rng(mix_seed(cfg_.master_seed, mix_seed(episode_seed, 0x51e9)));

  const int n = n_sats();
  active_.assign(static_cast<std::size_t>(n), 1);
  captured_locally_.assign(static_cast<std::size_t>(n),
                           std::vector<std::uint8_t>(targets_.size(), 0));
  t_index_ = 0;
  done_ = false;
  reset_called_ = true;
  capture_reward_total_ = 0.0;

  rebuild_target_windows();
  refresh_slot_bindings();

  std::vector<Observation> obs;
  obs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) obs.push_back(build_observation(i));
  return obs;
}

std::vector<SlotWindow> Env::upcoming_targets(int sat_index, double t_s, int k) const {
  if (!reset_called_) throw ContractError("upcoming_targets: environment not reset");
  const auto& wins = windows_[static_cast<std::size_t>(sat_index)];
  const int t_step = static_cast<int>(std::ceil(t_s / cfg_.dt_s - 1e-9));
  const int max_start = t_step + lookahead_steps_;

  auto it = std::lower_bound(wins.begin(), wins.end(), t_step,
                             [](const WindowRec& w, int step) { return w.start_step < step; });

  std::vector<SlotWindow> slots;
  slots.reserve(static_cast<std::size_t>(k));
  const auto& local = captured_locally_[static_cast<std::size_t>(sat_index)];
  for (; it != wins.end() && static_cast<int>(slots.size()) < k; ++it) {
    if (it->start_step > max_start) break;
    const int tid = it->target_id;
    if (local[static_cast<std::size_t>(tid)]) continue;
    bool dup = false;
    for (const auto& s : slots) {
      if (s.target_id == tid) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    slots.push_back({tid, it->start_step * cfg_.dt_s, it->end_step * cfg_.dt_s,
                     targets_[static_cast<std::size_t>(tid)].priority});
  }
  while (static_cast<int>(slots.size()) < k) slots.push_back(SlotWindow{});
  return slots;
}

void Env::refresh_slot_bindings() {
  const int n = n_sats();
  slot_binding_.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    const auto slots = upcoming_targets(i, time_s(), cfg_.k_slots);
    auto& bind = slot_binding_[static_cast<std::size_t>(i)];
    bind.resize(static_cast<std::size_t>(cfg_.k_slots));
    for (int s = 0; s < cfg_.k_slots; ++s) bind[static_cast<std::size_t>(s)] = slots[static_cast<std::size_t>(s)].target_id;
  }
}

bool Env::target_visible_at(int sat_index, int step, int target_id) const {
  const auto& ids = visible_ids_[static_cast<std::size_t>(sat_index)][static_cast<std::size_t>(step)];
  return std::binary_search(ids.begin(), ids.end(), target_id);
}

Observation Env::build_observation(int sat_index) const {
  if (!reset_called_) throw ContractError("build_observation: environment not reset");
  const auto& p = params_[static_cast<std::size_t>(sat_index)];
  const auto& r = res_[static_cast<std::size_t>(sat_index)];
  const double t = time_s();
  const double horizon = horizon_s();

  Observation obs(observation_length(cfg_.k_slots));
  obs[0] = clamp(r.battery_wh / p.b_max_wh, 0.0, 1.0);
  obs[1] = clamp(r.storage_gb / p.d_max_gb, 0.0, 1.0);
  for (int k = 0; k < 3; ++k) obs[2 + k] = clamp(r.rw_rpm[k] / p.omega_max_rpm, -1.0, 1.0);

  const Vec3& pos = pos_eci_[static_cast<std::size_t>(sat_index)][static_cast<std::size_t>(t_index_)];
  obs[5] = in_eclipse(pos, sun_direction(t)) ? 1.0 : 0.0;
  obs[6] = clamp(t / horizon, 0.0, 1.0);
  obs[7] = gs_visible_[static_cast<std::size_t>(sat_index)][static_cast<std::size_t>(t_index_)] ? 1.0 : 0.0;
  const int next_gs = next_gs_step_[static_cast<std::size_t>(sat_index)][static_cast<std::size_t>(t_index_)];
  obs[8] = next_gs < 0 ? 1.0 : clamp((next_gs - t_index_) * cfg_.dt_s / horizon, 0.0, 1.0);

  const auto slots = upcoming_targets(sat_index, t, cfg_.k_slots);
  for (int s = 0; s < cfg_.k_slots; ++s) {
    const auto& w = slots[static_cast<std::size_t>(s)];
    double* base = obs.data() + 9 + 3 * s;
    if (w.target_id < 0) {
      base[0] = 0.0;
      base[1] = 1.0;
      base[2] = 0.0;
    } else {
      base[0] = clamp(w.priority, 0.0, 1.0);
      base[1] = clamp((w.start_s - t) / horizon, 0.0, 1.0);
      base[2] = clamp((w.end_s - w.start_s) / horizon, 0.0, 1.0);
    }
  }
  return obs;
}

Eigen::VectorXd Env::global_state() const {
  if (!reset_called_) throw ContractError("global_state: environment not reset");
  const int n = n_sats();
  const int len = observation_length(cfg_.k_slots);
  Eigen::VectorXd gs(n * len + 1);
  for (int i = 0; i < n; ++i) gs.segment(i * len, len) = build_observation(i);
  gs[n * len] = static_cast<double>(captured_count()) / static_cast<double>(targets_.size());
  return gs;
}

StepResult Env::step(const std::vector<std::optional<Action>>& joint_action) {
  if (!reset_called_) throw ContractError("step: environment not reset");
  if (done_) throw ContractError("step: episode is done");
  const int n = n_sats();
  if (joint_action.size() != static_cast<std::size_t>(n)) {
    throw ContractError("step: joint action size must equal n_sats");
  }
  for (int i = 0; i < n; ++i) {
    const bool has = joint_action[static_cast<std::size_t>(i)].has_value();
    if (active_[static_cast<std::size_t>(i)] && !has) {
      throw ContractError("step: missing action for active agent");
    }
    if (!active_[static_cast<std::size_t>(i)] && has) {
      throw ContractError("step: action provided for inactive agent");
    }
  }

  t_index_ += 1;
  const double t = time_s();
  const Vec3 sun = sun_direction(t);

  StepResult result;
  result.events.assign(static_cast<std::size_t>(n), {});
  double reward = 0.0;

  // Same-step captures, resolved for uniqueness after all actions applied.
  std::vector<std::pair<int, int>> pending;  // (sat, target)

  for (int i = 0; i < n; ++i) {
    if (!active_[static_cast<std::size_t>(i)]) continue;
    const Action& a = *joint_action[static_cast<std::size_t>(i)];
    const auto& p = params_[static_cast<std::size_t>(i)];
    auto& r = res_[static_cast<std::size_t>(i)];
    switch (a.type) {
      case ActionType::charge: {
        const Vec3& pos = pos_eci_[static_cast<std::size_t>(i)][static_cast<std::size_t>(t_index_)];
        r = apply_charge(r, p, !in_eclipse(pos, sun));
        break;
      }
      case ActionType::downlink:
        r = apply_downlink(r, p, gs_visible_[static_cast<std::size_t>(i)][static_cast<std::size_t>(t_index_)] != 0);
        break;
      case ActionType::desaturate:
        r = apply_desaturate(r, p);
        break;
      case ActionType::capture: {
        if (a.slot < 0 || a.slot >= cfg_.k_slots) throw ContractError("step: capture slot out of range");
        const int tid = slot_binding_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a.slot)];
        const bool visible = tid >= 0 && target_visible_at(i, t_index_, tid);
        const auto outcome = apply_capture(r, p, visible, step_rng_);
        r = outcome.state;
        if (outcome.captured) {
          captured_locally_[static_cast<std::size_t>(i)][static_cast<std::size_t>(tid)] = 1;
          pending.emplace_back(i, tid);
        } else {
          result.events[static_cast<std::size_t>(i)].push_back({EventType::wasted_capture, tid, 0.0});
        }
        break;
      }
    }
  }

  // Uniqueness: in index order, the first capture of a fresh target scores.
  for (const auto& [sat, tid] : pending) {
    auto& tgt = targets_[static_cast<std::size_t>(tid)];
    if (!tgt.captured_by.has_value()) {
      tgt.captured_by = std::make_pair(sat, t_index_);
      reward += tgt.priority;
      capture_reward_total_ += tgt.priority;
      result.events[static_cast<std::size_t>(sat)].push_back({EventType::captured, tid, tgt.priority});
    } else if (tgt.captured_by->second == t_index_) {
      result.events[static_cast<std::size_t>(sat)].push_back({EventType::wasted_duplicate, tid, 0.0});
    } else {
      result.events[static_cast<std::size_t>(sat)].push_back({EventType::duplicate, tid, 0.0});
    }
  }

  // Failures: -100 once, then permanent deactivation.
  for (int i = 0; i < n; ++i) {
    if (!active_[static_cast<std::size_t>(i)]) continue;
    if (check_failure(res_[static_cast<std::size_t>(i)], params_[static_cast<std::size_t>(i)])) {
      active_[static_cast<std::size_t>(i)] = 0;
      reward -= 100.0;
      result.events[static_cast<std::size_t>(i)].push_back({EventType::failed, -1, 0.0});
    }
  }

  const bool any_active = std::any_of(active_.begin(), active_.end(), [](std::uint8_t a) { return a != 0; });
  done_ = (t_index_ >= horizon_steps_) || !any_active;

  refresh_slot_bindings();
  result.observations.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) result.observations.push_back(build_observation(i));
  result.team_reward = reward;
  result.done = done_;
  result.active = active_;
  return result;
}

double Env::sum_priorities() const { return priority_sum_; }

int Env::captured_count() const {
  int c = 0;
  for (const auto& t : targets_) c += t.captured_by.has_value() ? 1 : 0;
  return c;
}

Vec3 Env::position_eci(int sat_index, int step) const {
  return pos_eci_.at(static_cast<std::size_t>(sat_index)).at(static_cast<std::size_t>(step));
}

bool Env::gs_visible(int sat_index, int step) const {
  return gs_visible_.at(static_cast<std::size_t>(sat_index)).at(static_cast<std::size_t>(step)) != 0;
}

void Env::set_resources(int sat_index, const ResourceState& s) {
  res_.at(static_cast<std::size_t>(sat_index)) = s;
}

}  // namespace satmarl
