#pragma once

// Circular-orbit geometry: propagation, Earth rotation, sun/eclipse,
// elevation and constellation generation. Everything here is a pure
// function of its inputs; no ephemerides, no perturbations.
//
// Conventions:
//  - spherical Earth of radius 6371 km
//  - ECI and ECEF frames coincide at t = 0
//  - orbits are circular (eccentricity fixed at 0)

#include <vector>

#include <Eigen/Core>

#include "satmarl/common.hpp"

namespace satmarl {

using Vec3 = Eigen::Vector3d;

struct OrbitalElements {
  double semi_major_axis_km = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double anomaly_at_epoch_rad = 0.0;
};

struct CartesianState {
  Vec3 position_km;
  Vec3 velocity_km_s;
};

// lat in [-pi/2, pi/2], lon in [-pi, pi).
struct GroundPoint {
  double lat_rad = 0.0;
  double lon_rad = 0.0;
};

enum class ConstellationKind { walker_delta, cluster };

struct ConstellationSpec {
  ConstellationKind kind = ConstellationKind::cluster;
  int n_sats = 1;
  int n_planes = 1;    // walker_delta only
  int phasing_f = 0;   // walker_delta only
  double inclination_rad = deg2rad(45.0);
  double altitude_km = 500.0;
  double cluster_spacing_rad = deg2rad(2.0);  // cluster only
};

// 2*pi*sqrt(a^3/mu). Throws std::domain_error for a <= 0 and requires the
// orbit to sit above the spherical Earth.
double orbital_period_s(double a_km);

// Position/velocity on the circular orbit at time t, rotated by RAAN about
// the polar axis after inclining the plane about x.
CartesianState propagate_circular(const OrbitalElements& el, double t_s);

// Rotation about the polar axis by -omega_earth*t.
Vec3 eci_to_ecef(const Vec3& pos_eci, double t_s);

// Unit sun direction on a circular ecliptic (period 365.25 d, obliquity
// 23.44 deg, (1,0,0) at t = 0).
Vec3 sun_direction(double t_s);

// Cylindrical umbra: behind the terminator plane and inside the Earth
// shadow cylinder.
bool in_eclipse(const Vec3& sat_pos_eci, const Vec3& sun_dir);

// ECEF position of a ground point on the spherical Earth.
Vec3 ground_point_ecef(const GroundPoint& gp);

// Angle between the local horizon plane at gp and the line of sight to the
// satellite, in [-pi/2, pi/2].
double elevation_angle(const GroundPoint& gp, const Vec3& sat_ecef);

// Constellation generators. Deterministic functions of the spec; throw
// ConfigError on invalid specs.
std::vector<OrbitalElements> make_walker_delta(const ConstellationSpec& spec);
std::vector<OrbitalElements> make_cluster(const ConstellationSpec& spec);
std::vector<OrbitalElements> make_constellation(const ConstellationSpec& spec);

}  // namespace satmarl
