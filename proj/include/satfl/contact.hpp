#pragma once

// Access windows between satellites and ground stations (and between
// adjacent satellites of a cluster), plus the contact queries used by
// client selection.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satfl/ground_stations.hpp"
#include "satfl/orbital.hpp"

namespace satfl {

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool contains(double t) const { return t >= start_s && t < end_s; }
  bool operator==(const Interval&) const = default;
};

struct Horizon {
  double t0_s = 0.0;
  double t1_s = 0.0;

  double length() const { return t1_s - t0_s; }
  bool operator==(const Horizon&) const = default;
};

struct Counterpart {
  enum class Kind { Station, Satellite };
  Kind kind = Kind::Station;
  int index = 0;  // station index or satellite index inside the timeline

  bool operator==(const Counterpart&) const = default;
};

struct AccessWindow {
  SatelliteId sat;
  Counterpart peer;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool operator==(const AccessWindow&) const = default;
};

struct ScanParams {
  double min_elevation_rad = deg2rad(10.0);
  double coarse_step_s = 10.0;
  double refine_tol_s = 0.1;
  double gmst0_rad = 0.0;
};

enum class Exec { Serial, Parallel };

// Immutable-after-construction store of windows for one constellation.
// Satellites are addressed by dense index (cluster-major for generated
// constellations); stations by their position in stations().
class ContactTimeline {
 public:
  ContactTimeline() = default;
  ContactTimeline(std::vector<SatelliteId> satellites, std::vector<std::string> stations,
                  Horizon horizon);

  // Windows for one (satellite, station) pair: sorted, disjoint, inside the horizon.
  // Throws ValidationError otherwise.
  void add_ground_windows(int sat, int station, std::vector<Interval> windows);
  void add_link_windows(int sat_a, int sat_b, std::vector<Interval> windows);

  const Horizon& horizon() const { return horizon_; }
  const std::vector<SatelliteId>& satellites() const { return sats_; }
  const std::vector<std::string>& stations() const { return stations_; }
  int num_satellites() const { return static_cast<int>(sats_.size()); }
  int index_of(const SatelliteId& id) const;

  // All ground windows of one satellite ordered by (start, station index).
  std::span<const AccessWindow> ground_windows(int sat) const { return ground_[sat]; }
  std::vector<Interval> windows(int sat, int station) const;
  // Empty span when the pair has no link windows.
  std::span<const Interval> link_windows(int sat_a, int sat_b) const;
  bool link_up(int sat_a, int sat_b, double t) const;
  const std::map<std::pair<int, int>, std::vector<Interval>>& links() const { return links_; }

  // Earliest window with end > t; a window containing t wins. Ties on start
  // go to the lower station index.
  std::optional<AccessWindow> next_contact(int sat, double t) const;
  // Earliest window whose start is >= t (a fresh contact).
  std::optional<AccessWindow> next_contact_starting(int sat, double t) const;

  // Copy keeping only the first n stations (nested-subset catalogs).
  ContactTimeline with_first_stations(int n) const;

  size_t total_ground_windows() const;
  bool operator==(const ContactTimeline&) const = default;

 private:
  std::vector<SatelliteId> sats_;
  std::vector<std::string> stations_;
  Horizon horizon_;
  std::vector<std::vector<AccessWindow>> ground_;
  std::vector<double> max_len_;
  std::map<std::pair<int, int>, std::vector<Interval>> links_;
};

// Maximal intervals where elevation >= min_elevation, edges refined by
// bisection. A pass shorter than the coarse step can be missed; at 500 km
// passes last minutes, so the 10 s default cannot skip one.
std::vector<Interval> scan_windows(const OrbitSpec& orbit, const GroundStation& gs,
                                   Horizon horizon, const ScanParams& params = {},
                                   const EarthModel& earth = {});

// Maximal intervals of inter-satellite line of sight. Identical orbits
// (a satellite paired with itself) are rejected with std::invalid_argument.
std::vector<Interval> scan_intersat_windows(const OrbitSpec& a, const OrbitSpec& b,
                                            Horizon horizon, const EarthModel& earth = {},
                                            double coarse_step_s = 10.0,
                                            double refine_tol_s = 0.1);

// Scans every (satellite, station) pair, and adjacent same-cluster pairs
// when `intra_cluster_links` is set. Serial and Parallel produce identical
// timelines.
ContactTimeline build_contact_timeline(const std::vector<ConstellationMember>& members,
                                       const std::vector<GroundStation>& stations,
                                       Horizon horizon, const ScanParams& params = {},
                                       const EarthModel& earth = {},
                                       bool intra_cluster_links = true,
                                       Exec exec = Exec::Parallel);

// Ring neighbours (slot +/- 1) within a cluster; one pair when the cluster
// has two satellites, none when it has one.
std::vector<std::pair<int, int>> adjacent_pairs(const std::vector<SatelliteId>& sats);

std::optional<AccessWindow> next_contact(const ContactTimeline& timeline, const SatelliteId& sat,
                                         double t);

struct RoundTrip {
  double t_rx = 0.0;
  double t_tx = 0.0;
  double score_s = 0.0;
};

// score = (t_rx - t_now) + (t_tx - (t_rx + training_duration)), where t_rx is
// the next contact (t_now itself when already in view) and t_tx the first
// contact starting after training completes.
std::optional<RoundTrip> round_trip_score(const ContactTimeline& timeline, int sat,
                                          double t_now, double training_duration_s);

struct CsvImportOptions {
  std::optional<Horizon> horizon;  // default: [0, latest window end]
  int sats_per_cluster = 0;        // maps bare integer ids; 0 = all in cluster 0
  // Station ordering and display names; unknown names follow in file order.
  std::vector<GroundStation> catalog = default_station_catalog();
};

// Header: sat_id,counterpart,start_s,end_s
void write_windows_csv(const ContactTimeline& timeline, std::ostream& out);
void export_windows_csv(const ContactTimeline& timeline, const std::string& path);
ContactTimeline read_windows_csv(std::istream& in, const std::string& source_name,
                                 const CsvImportOptions& options = {});
ContactTimeline import_windows_csv(const std::string& path, const CsvImportOptions& options = {});

}  // namespace satfl
