#pragma once

// The decentralised multi-satellite tasking environment: world state,
// per-agent observations, joint stepping, team reward with unique-capture
// accounting, and randomized episode initialization.
//
// One Env instance is single-threaded. Independent instances with their own
// seeds are safe to run in parallel.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "satmarl/astro.hpp"
#include "satmarl/satmodel.hpp"

namespace satmarl {

using Observation = Eigen::VectorXd;

struct Target {
  int id = 0;
  GroundPoint point;
  double priority = 0.0;  // in [0, 1]
  // (satellite index, step index) of the constellation-wide first capture.
  std::optional<std::pair<int, int>> captured_by;
};

struct RandomizationFlags {
  bool rw_init = false;       // wheel speeds uniform in +-3000 RPM
  bool battery_init = false;  // battery level uniform in 40-80%
  bool storage_init = false;  // data storage uniform in 20-80%
  bool disturbance = false;   // per-capture Bernoulli spoiler active
};

std::vector<GroundPoint> default_ground_stations();

struct EnvConfig {
  ConstellationSpec constellation;
  // Size 1 (shared by all satellites) or n_sats (heterogeneous).
  std::vector<SatelliteParams> sat_params{SatelliteParams{}};
  int n_targets = 2000;
  double horizon_orbits = 2.0;
  double dt_s = 60.0;
  int k_slots = 3;
  std::vector<GroundPoint> ground_stations = default_ground_stations();
  double target_elev_min_rad = deg2rad(60.0);
  double gs_elev_min_rad = deg2rad(10.0);
  RandomizationFlags randomize;
  // Effective per-capture spoiler probability while randomize.disturbance is on.
  double disturbance_fail_prob = 0.05;
  std::uint64_t master_seed = 0;
  // Scripted scenarios: when set, every reset uses exactly these targets
  // instead of sampling n_targets fresh ones. In-process only (not part of
  // the config file schema).
  std::optional<std::vector<Target>> fixed_targets;
};

void validate_config(const EnvConfig& cfg);  // throws ConfigError

enum class EventType {
  captured,          // unique capture, reward scored
  duplicate,         // image stored, target already captured elsewhere
  wasted_capture,    // capture attempted and failed (not visible/full/spoiled)
  wasted_duplicate,  // lost a same-step tie to a lower index
  failed             // resource failure, agent deactivated
};

struct AgentEvent {
  EventType type;
  int target_id = -1;
  double reward = 0.0;  // rho scored by this event (captures only)
};

struct StepResult {
  std::vector<Observation> observations;
  double team_reward = 0.0;
  std::vector<std::vector<AgentEvent>> events;  // per agent
  bool done = false;
  std::vector<std::uint8_t> active;  // per agent, after this step
};

struct SlotWindow {
  int target_id = -1;  // -1 = padded slot
  double start_s = 0.0;
  double end_s = 0.0;
  double priority = 0.0;
};

// Area-uniform points on the sphere with independent uniform priorities.
// Draw order per target: longitude, sin(latitude), priority.
std::vector<Target> generate_targets(int n, Rng& rng);

int observation_length(int k_slots);  // 9 + 3*k

class Env {
 public:
  explicit Env(EnvConfig cfg);

  // Regenerates targets and initial resources from (master_seed, episode_seed).
  std::vector<Observation> reset(std::uint64_t episode_seed);
  // Same, but with a caller-provided target set (scripted scenarios/tests).
  std::vector<Observation> reset_with_targets(std::uint64_t episode_seed,
                                              std::vector<Target> targets);

  // One action per active agent; entries for inactive agents must be
  // nullopt. Throws ContractError on misuse (stepping after done, actions
  // for inactive agents, missing actions for active agents).
  StepResult step(const std::vector<std::optional<Action>>& joint_action);

  Observation build_observation(int sat_index) const;

  // Next k target windows for this satellite: window start >= t, within one
  // orbital period, excluding targets this satellite itself captured.
  // Fewer than k available -> padded slots (target_id = -1).
  std::vector<SlotWindow> upcoming_targets(int sat_index, double t_s, int k) const;

  // All agents' observations in index order + fraction of targets captured.
  Eigen::VectorXd global_state() const;

  int action_space() const { return action_count(cfg_.k_slots); }

  // Accessors.
  const EnvConfig& config() const { return cfg_; }
  int n_sats() const { return cfg_.constellation.n_sats; }
  int horizon_steps() const { return horizon_steps_; }
  double horizon_s() const { return horizon_steps_ * cfg_.dt_s; }
  double orbit_period_s() const { return period_s_; }
  double time_s() const { return t_index_ * cfg_.dt_s; }
  int step_index() const { return t_index_; }
  bool is_reset() const { return reset_called_; }
  bool done() const { return done_; }
  const std::vector<Target>& targets() const { return targets_; }
  const std::vector<std::uint8_t>& active() const { return active_; }
  const ResourceState& resources(int i) const { return res_.at(static_cast<std::size_t>(i)); }
  const SatelliteParams& params(int i) const { return params_.at(static_cast<std::size_t>(i)); }
  double sum_priorities() const;
  int captured_count() const;
  // Capture reward scored so far this episode (uniqueness audit hook).
  double capture_reward_total() const { return capture_reward_total_; }
  Vec3 position_eci(int sat_index, int step) const;
  bool gs_visible(int sat_index, int step) const;

  // Scenario hook: overwrite one satellite's resources in place.
  void set_resources(int sat_index, const ResourceState& s);

 private:
  struct WindowRec {
    int start_step;
    int end_step;  // exclusive
    int target_id;
  };

  void precompute_geometry();
  void rebuild_target_windows();
  void init_resources(Rng& rng);
  void refresh_slot_bindings();
  bool target_visible_at(int sat_index, int step, int target_id) const;

  EnvConfig cfg_;
  std::vector<SatelliteParams> params_;  // expanded to n_sats
  std::vector<OrbitalElements> elements_;
  double period_s_ = 0.0;
  int horizon_steps_ = 0;
  int lookahead_steps_ = 0;
  int total_steps_ = 0;  // horizon + lookahead

  // Geometry tables, fixed per configuration.
  std::vector<std::vector<Vec3>> pos_eci_;             // [sat][step]
  std::vector<std::vector<std::uint8_t>> gs_visible_;  // [sat][step]
  std::vector<std::vector<int>> next_gs_step_;         // [sat][step], -1 = none

  // Per-episode state.
  std::vector<Target> targets_;
  std::vector<ResourceState> res_;
  std::vector<std::uint8_t> active_;
  std::vector<std::vector<std::uint8_t>> captured_locally_;  // [sat][target]
  std::vector<std::vector<WindowRec>> windows_;              // [sat], sorted by start
  std::vector<std::vector<std::vector<int>>> visible_ids_;   // [sat][step] sorted target ids
  std::vector<std::vector<int>> slot_binding_;               // [sat][k] target ids, -1 padded
  Rng step_rng_{0};
  int t_index_ = 0;
  bool reset_called_ = false;
  bool done_ = false;
  double capture_reward_total_ = 0.0;
  double priority_sum_ = 0.0;
};

}  // namespace satmarl
