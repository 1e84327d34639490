#include "satmarl/satmodel.hpp"

#include <algorithm>
#include <cmath>

namespace satmarl {

namespace {

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

int action_count(int k_slots) {
  if (k_slots < 1) throw ContractError("action_count: k_slots must be >= 1");
  return 3 + k_slots;
}

int action_to_index(const Action& a) {
  switch (a.type) {
    case ActionType::charge: return 0;
    case ActionType::downlink: return 1;
    case ActionType::desaturate: return 2;
    case ActionType::capture: return 3 + a.slot;
  }
  throw ContractError("action_to_index: invalid action type");
}

Action action_from_index(int index, int k_slots) {
  if (index < 0 || index >= action_count(k_slots)) {
    throw ContractError("action_from_index: index out of range");
  }
  switch (index) {
    case 0: return Action::make_charge();
    case 1: return Action::make_downlink();
    case 2: return Action::make_desaturate();
    default: return Action::make_capture(index - 3);
  }
}

Eigen::Vector3d slew_increment(Rng& rng, const SatelliteParams& p) {
  Eigen::Vector3d inc;
  for (int k = 0; k < 3; ++k) inc[k] = rng.uniform(p.slew_rpm_min, p.slew_rpm_max);
  return inc;
}

ResourceState apply_charge(const ResourceState& s, const SatelliteParams& p, bool sunlit) {
  ResourceState out = s;
  out.battery_wh = clamp(s.battery_wh - p.base_draw_wh + (sunlit ? p.charge_gain_wh : 0.0),
                         0.0, p.b_max_wh);
  return out;
}

CaptureOutcome apply_capture(const ResourceState& s, const SatelliteParams& p,
                             bool target_visible, Rng& rng) {
  CaptureOutcome out;
  out.state = s;
  out.state.battery_wh = clamp(s.battery_wh - p.base_draw_wh - p.capture_cost_wh, 0.0, p.b_max_wh);
  out.state.rw_rpm = s.rw_rpm + slew_increment(rng, p);

  // Always draw, so the stream does not depend on visibility or storage.
  const double disturbance = rng.uniform();
  const bool storage_ok = s.storage_gb + p.image_size_gb <= p.d_max_gb;
  out.captured = target_visible && storage_ok && disturbance >= p.disturbance_fail_prob;
  if (out.captured) out.state.storage_gb = s.storage_gb + p.image_size_gb;
  return out;
}

ResourceState apply_downlink(const ResourceState& s, const SatelliteParams& p, bool gs_visible) {
  ResourceState out = s;
  out.battery_wh = clamp(s.battery_wh - p.base_draw_wh - p.downlink_cost_wh, 0.0, p.b_max_wh);
  if (gs_visible) out.storage_gb = std::max(0.0, s.storage_gb - p.baud_gb_per_step);
  return out;
}

ResourceState apply_desaturate(const ResourceState& s, const SatelliteParams& p) {
  ResourceState out = s;
  out.battery_wh = clamp(s.battery_wh - p.base_draw_wh - p.desat_cost_wh, 0.0, p.b_max_wh);
  for (int k = 0; k < 3; ++k) {
    const double mag = std::max(0.0, std::abs(s.rw_rpm[k]) - p.desat_rate_rpm);
    out.rw_rpm[k] = std::copysign(mag, s.rw_rpm[k]);
  }
  return out;
}

bool check_failure(const ResourceState& s, const SatelliteParams& p) {
  if (s.battery_wh <= 0.0) return true;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(s.rw_rpm[k]) >= p.omega_max_rpm) return true;
  }
  return false;
}

}  // namespace satmarl
