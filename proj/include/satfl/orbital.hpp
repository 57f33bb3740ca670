#pragma once

// Circular two-body propagation, Walker-Star construction and the
// visibility predicates everything else is built on.

#include <cmath>
#include <compare>
#include <numbers>
#include <string>
#include <vector>

namespace satfl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct EarthModel {
  double radius_km = 6371.0;
  double mu_km3_s2 = 398600.4418;
  double rotation_rate_rad_s = 7.2921159e-5;
  // Extra clearance an inter-satellite line of sight needs above the surface.
  double grazing_margin_km = 100.0;

  void validate() const;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct EciPosition {
  Vec3 r;          // km
  double t_s = 0;  // seconds from simulation epoch
};

struct OrbitSpec {
  double semi_major_axis_km = 0.0;
  double eccentricity = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double arg_perigee_rad = 0.0;
  double true_anomaly_epoch_rad = 0.0;

  void validate(const EarthModel& earth = {}) const;
};

struct ConstellationSpec {
  int n_clusters = 1;
  int sats_per_cluster = 1;
  double altitude_km = 500.0;
  double inclination_rad = deg2rad(90.0);
  double raan_spread_rad = kPi;  // Walker-Star: planes span 180 degrees

  void validate() const;
  int size() const { return n_clusters * sats_per_cluster; }
};

struct SatelliteId {
  int cluster = 0;
  int slot = 0;

  auto operator<=>(const SatelliteId&) const = default;

  // "c<cluster>_s<slot>"
  std::string str() const;
  static SatelliteId parse(const std::string& text);
};

struct GroundStation {
  std::string name;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_km = 0.0;

  void validate() const;
};

struct ConstellationMember {
  SatelliteId id;
  OrbitSpec orbit;
};

// Throws std::domain_error on non-positive inputs.
double orbital_period(double a_km, double mu_km3_s2 = EarthModel{}.mu_km3_s2);

// Cluster-major ordering: index k = cluster * sats_per_cluster + slot.
std::vector<ConstellationMember> build_constellation(const ConstellationSpec& spec,
                                                     const EarthModel& earth = {});

EciPosition propagate(const OrbitSpec& orbit, double t_s, const EarthModel& earth = {});

EciPosition station_position_eci(const GroundStation& gs, double t_s,
                                 const EarthModel& earth = {}, double gmst0_rad = 0.0);

// Topocentric elevation of `sat` seen from `gs`, in [-pi/2, pi/2].
// Throws std::domain_error when the points coincide or gs is at the origin.
double elevation_angle(const EciPosition& sat, const EciPosition& gs);

// Line of sight between two satellites: the segment must clear
// radius_km + grazing_margin_km.
bool is_visible_intersat(const EciPosition& a, const EciPosition& b,
                         const EarthModel& earth = {});

}  // namespace satfl
