#pragma once

// Per-satellite resource dynamics: the four actions (capture, downlink,
// charge, desaturate) and the failure predicate. Pure state-in/state-out
// functions; the RNG is owned by the caller.

#include <Eigen/Core>

#include "satmarl/common.hpp"

namespace satmarl {

struct ResourceState {
  double battery_wh = 0.0;
  double storage_gb = 0.0;
  Eigen::Vector3d rw_rpm = Eigen::Vector3d::Zero();  // wheel speeds per axis
};

struct SatelliteParams {
  double b_min_wh = 0.0;
  double b_max_wh = 400.0;
  double d_max_gb = 500.0;
  double omega_max_rpm = 6000.0;

  // Energy per step (Wh at dt = 60 s).
  double base_draw_wh = 0.2;
  double capture_cost_wh = 1.0;
  double downlink_cost_wh = 1.5;
  double desat_cost_wh = 0.5;
  double charge_gain_wh = 4.0;

  double image_size_gb = 0.5;
  double baud_gb_per_step = 0.25;

  double slew_rpm_min = 200.0;
  double slew_rpm_max = 600.0;
  double desat_rate_rpm = 1500.0;

  // Per-capture Bernoulli spoiler standing in for attitude disturbance.
  double disturbance_fail_prob = 0.0;
};

enum class ActionType { charge, downlink, desaturate, capture };

struct Action {
  ActionType type = ActionType::charge;
  int slot = 0;  // capture only: index into the observed upcoming-target slots

  static Action make_charge() { return {ActionType::charge, 0}; }
  static Action make_downlink() { return {ActionType::downlink, 0}; }
  static Action make_desaturate() { return {ActionType::desaturate, 0}; }
  static Action make_capture(int slot) { return {ActionType::capture, slot}; }

  bool operator==(const Action&) const = default;
};

// Discrete action space: {charge, downlink, desaturate, capture(0..k-1)}.
int action_count(int k_slots);
int action_to_index(const Action& a);
Action action_from_index(int index, int k_slots);

// Secular momentum buildup per maneuver: one independent uniform draw in
// [slew_rpm_min, slew_rpm_max] per axis, always spinning the wheels up.
// Each capture therefore walks the wheels toward saturation until a
// desaturation pulls them back; roughly 6-10 captures saturate a wheel
// that starts near +3000 RPM.
Eigen::Vector3d slew_increment(Rng& rng, const SatelliteParams& p);

ResourceState apply_charge(const ResourceState& s, const SatelliteParams& p, bool sunlit);

struct CaptureOutcome {
  ResourceState state;
  bool captured = false;
};

// The slew is attempted (and the energy spent) whether or not the capture
// succeeds. Consumes exactly 4 RNG draws: 3 slew magnitudes + 1
// disturbance draw.
CaptureOutcome apply_capture(const ResourceState& s, const SatelliteParams& p,
                             bool target_visible, Rng& rng);

ResourceState apply_downlink(const ResourceState& s, const SatelliteParams& p, bool gs_visible);

// Wheels move toward zero by desat_rate_rpm, clamping at zero.
ResourceState apply_desaturate(const ResourceState& s, const SatelliteParams& p);

// Battery empty or any wheel at/over the speed limit (absolute value).
bool check_failure(const ResourceState& s, const SatelliteParams& p);

}  // namespace satmarl
