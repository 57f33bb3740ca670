#include "satfl/orbital.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace satfl {

void EarthModel::validate() const {
  if (!(radius_km > 0.0)) throw std::invalid_argument("earth radius must be positive");
  if (!(mu_km3_s2 > 0.0)) throw std::invalid_argument("gravitational parameter must be positive");
  if (!(grazing_margin_km >= 0.0)) throw std::invalid_argument("grazing margin must be >= 0");
}

void OrbitSpec::validate(const EarthModel& earth) const {
  if (eccentricity != 0.0) throw std::invalid_argument("only circular orbits are supported");
  if (!(semi_major_axis_km > earth.radius_km))
    throw std::invalid_argument("semi-major axis must exceed the earth radius");
  for (double a : {inclination_rad, raan_rad, arg_perigee_rad, true_anomaly_epoch_rad})
    if (!std::isfinite(a)) throw std::invalid_argument("orbit angles must be finite");
}

void ConstellationSpec::validate() const {
  if (n_clusters < 1) throw std::invalid_argument("n_clusters must be >= 1");
  if (sats_per_cluster < 1) throw std::invalid_argument("sats_per_cluster must be >= 1");
  if (!(altitude_km > 0.0)) throw std::invalid_argument("altitude must be positive");
}

std::string SatelliteId::str() const {
  return "c" + std::to_string(cluster) + "_s" + std::to_string(slot);
}

SatelliteId SatelliteId::parse(const std::string& text) {
  SatelliteId id;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "c%d_s%d%n", &id.cluster, &id.slot, &consumed) != 2 ||
      consumed != static_cast<int>(text.size()) || id.cluster < 0 || id.slot < 0)
    throw std::invalid_argument("malformed satellite id '" + text + "'");
  return id;
}

void GroundStation::validate() const {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
    throw std::invalid_argument("station " + name + ": latitude out of range");
  if (!(lon_deg >= -180.0 && lon_deg <= 180.0))
    throw std::invalid_argument("station " + name + ": longitude out of range");
}

double orbital_period(double a_km, double mu_km3_s2) {
  if (!(a_km > 0.0) || !(mu_km3_s2 > 0.0))
    throw std::domain_error("orbital_period: inputs must be positive");
  return kTwoPi * std::sqrt(a_km * a_km * a_km / mu_km3_s2);
}

std::vector<ConstellationMember> build_constellation(const ConstellationSpec& spec,
                                                     const EarthModel& earth) {
  spec.validate();
  std::vector<ConstellationMember> out;
  out.reserve(static_cast<size_t>(spec.size()));
  const double a = earth.radius_km + spec.altitude_km;
  for (int p = 0; p < spec.n_clusters; ++p) {
    for (int q = 0; q < spec.sats_per_cluster; ++q) {
      OrbitSpec o;
      o.semi_major_axis_km = a;
      o.inclination_rad = spec.inclination_rad;
      o.raan_rad = p * spec.raan_spread_rad / spec.n_clusters;
      o.true_anomaly_epoch_rad = q * kTwoPi / spec.sats_per_cluster;
      out.push_back({{p, q}, o});
    }
  }
  return out;
}

EciPosition propagate(const OrbitSpec& orbit, double t_s, const EarthModel& earth) {
  const double a = orbit.semi_major_axis_km;
  const double n = std::sqrt(earth.mu_km3_s2 / (a * a * a));
  // Argument of latitude; perigee is fixed at zero for circular orbits.
  const double u = orbit.arg_perigee_rad + orbit.true_anomaly_epoch_rad + n * t_s;
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(orbit.raan_rad), so = std::sin(orbit.raan_rad);
  const double ci = std::cos(orbit.inclination_rad), si = std::sin(orbit.inclination_rad);
  return {{a * (co * cu - so * su * ci), a * (so * cu + co * su * ci), a * su * si}, t_s};
}

EciPosition station_position_eci(const GroundStation& gs, double t_s, const EarthModel& earth,
                                 double gmst0_rad) {
  const double r = earth.radius_km + gs.alt_km;
  const double lat = deg2rad(gs.lat_deg);
  const double lon = deg2rad(gs.lon_deg) + gmst0_rad + earth.rotation_rate_rad_s * t_s;
  return {{r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)},
          t_s};
}

double elevation_angle(const EciPosition& sat, const EciPosition& gs) {
  const double gs_norm = gs.r.norm();
  const Vec3 los = sat.r - gs.r;
  const double range = los.norm();
  if (gs_norm == 0.0 || range == 0.0)
    throw std::domain_error("elevation_angle: coincident points");
  const double s = std::clamp(los.dot(gs.r) / (range * gs_norm), -1.0, 1.0);
  return std::asin(s);
}

bool is_visible_intersat(const EciPosition& a, const EciPosition& b, const EarthModel& earth) {
  const Vec3 d = b.r - a.r;
  const double dd = d.dot(d);
  double s = 0.0;
  if (dd > 0.0) s = std::clamp(-a.r.dot(d) / dd, 0.0, 1.0);
  const double closest = (a.r + d * s).norm();
  return closest > earth.radius_km + earth.grazing_margin_km;
}

}  // namespace satfl
