#include "satmarl/astro.hpp"

#include <cmath>

namespace satmarl {

double orbital_period_s(double a_km) {
  if (a_km <= 0.0) throw std::domain_error("orbital_period_s: semi-major axis must be positive");
  if (a_km <= kEarthRadiusKm) {
    throw std::domain_error("orbital_period_s: orbit below Earth surface");
  }
  return kTwoPi * std::sqrt(a_km * a_km * a_km / kMuEarth);
}

CartesianState propagate_circular(const OrbitalElements& el, double t_s) {
  const double a = el.semi_major_axis_km;
  const double period = orbital_period_s(a);
  const double nu = el.anomaly_at_epoch_rad + kTwoPi * t_s / period;
  const double rate = kTwoPi / period;

  // In-plane state, then rotate Rz(raan) * Rx(inclination).
  const double cn = std::cos(nu), sn = std::sin(nu);
  const Vec3 pos_plane(a * cn, a * sn, 0.0);
  const Vec3 vel_plane(-a * rate * sn, a * rate * cn, 0.0);

  const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
  const double cr = std::cos(el.raan_rad), sr = std::sin(el.raan_rad);
  Eigen::Matrix3d rot;
  rot << cr, -sr * ci, sr * si,
         sr, cr * ci, -cr * si,
         0.0, si, ci;

  return CartesianState{rot * pos_plane, rot * vel_plane};
}

Vec3 eci_to_ecef(const Vec3& pos_eci, double t_s) {
  const double ang = -kEarthRotationRate * t_s;
  const double c = std::cos(ang), s = std::sin(ang);
  return Vec3(c * pos_eci.x() - s * pos_eci.y(),
              s * pos_eci.x() + c * pos_eci.y(),
              pos_eci.z());
}

Vec3 sun_direction(double t_s) {
  const double ang = kTwoPi * t_s / kYearSeconds;
  const double co = std::cos(kObliquityRad), so = std::sin(kObliquityRad);
  // Ecliptic basis: e1 = x, e2 = (0, cos eps, sin eps).
  return Vec3(std::cos(ang), std::sin(ang) * co, std::sin(ang) * so);
}

bool in_eclipse(const Vec3& sat_pos_eci, const Vec3& sun_dir) {
  const double along = sat_pos_eci.dot(sun_dir);
  if (along >= 0.0) return false;
  const Vec3 perp = sat_pos_eci - along * sun_dir;
  return perp.norm() < kEarthRadiusKm;
}

Vec3 ground_point_ecef(const GroundPoint& gp) {
  const double cl = std::cos(gp.lat_rad);
  return kEarthRadiusKm * Vec3(cl * std::cos(gp.lon_rad), cl * std::sin(gp.lon_rad), std::sin(gp.lat_rad));
}

double elevation_angle(const GroundPoint& gp, const Vec3& sat_ecef) {
  const Vec3 site = ground_point_ecef(gp);
  const Vec3 up = site.normalized();
  const Vec3 los = sat_ecef - site;
  const double n = los.norm();
  if (n == 0.0) return kPi / 2.0;  // satellite exactly at the site
  double s = up.dot(los) / n;
  s = std::min(1.0, std::max(-1.0, s));
  return std::asin(s);
}

std::vector<OrbitalElements> make_walker_delta(const ConstellationSpec& spec) {
  if (spec.kind != ConstellationKind::walker_delta) {
    throw ConfigError("make_walker_delta: spec kind is not walker_delta");
  }
  if (spec.n_sats < 1 || spec.n_planes < 1 || spec.n_sats % spec.n_planes != 0) {
    throw ConfigError("make_walker_delta: n_sats must be a positive multiple of n_planes");
  }
  if (spec.phasing_f < 0) throw ConfigError("make_walker_delta: phasing_f must be >= 0");
  const double a = kEarthRadiusKm + spec.altitude_km;
  const int per_plane = spec.n_sats / spec.n_planes;

  std::vector<OrbitalElements> out;
  out.reserve(static_cast<std::size_t>(spec.n_sats));
  for (int p = 0; p < spec.n_planes; ++p) {
    const double raan = kTwoPi * p / spec.n_planes;
    const double plane_phase = kTwoPi * spec.phasing_f * p / spec.n_sats;
    for (int s = 0; s < per_plane; ++s) {
      const double anomaly = kTwoPi * s / per_plane + plane_phase;
      out.push_back({a, spec.inclination_rad, raan, anomaly});
    }
  }
  return out;
}

std::vector<OrbitalElements> make_cluster(const ConstellationSpec& spec) {
  if (spec.kind != ConstellationKind::cluster) {
    throw ConfigError("make_cluster: spec kind is not cluster");
  }
  if (spec.n_sats < 1) throw ConfigError("make_cluster: n_sats must be >= 1");
  if (spec.cluster_spacing_rad <= 0.0) {
    throw ConfigError("make_cluster: cluster_spacing_rad must be > 0");
  }
  const double a = kEarthRadiusKm + spec.altitude_km;

  // Index 0 gets the largest anomaly so it leads the formation and reaches
  // any ground point first.
  std::vector<OrbitalElements> out;
  out.reserve(static_cast<std::size_t>(spec.n_sats));
  for (int i = 0; i < spec.n_sats; ++i) {
    const double anomaly = (spec.n_sats - 1 - i) * spec.cluster_spacing_rad;
    out.push_back({a, spec.inclination_rad, 0.0, anomaly});
  }
  return out;
}

std::vector<OrbitalElements> make_constellation(const ConstellationSpec& spec) {
  return spec.kind == ConstellationKind::walker_delta ? make_walker_delta(spec)
                                                      : make_cluster(spec);
}

}  // namespace satmarl
