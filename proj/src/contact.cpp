#include "satfl/contact.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "satfl/errors.hpp"
#include "satfl/ground_stations.hpp"

namespace satfl {

namespace {

constexpr double kHorizonSlack = 1e-6;

void check_windows(const std::vector<Interval>& w, const Horizon& h, const std::string& what) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (!(w[i].start_s < w[i].end_s))
      throw ValidationError(what + ": window with start >= end");
    if (w[i].start_s < h.t0_s - kHorizonSlack || w[i].end_s > h.t1_s + kHorizonSlack)
      throw ValidationError(what + ": window outside the horizon");
    if (i > 0 && w[i].start_s < w[i - 1].end_s)
      throw ValidationError(what + ": windows unsorted or overlapping");
  }
}

// Maximal intervals of [t0, t1] where pred holds, sampled every `step` and
// refined at each transition by bisection down to `tol`.
template <typename Pred>
std::vector<Interval> scan_predicate(Pred&& pred, Horizon h, double step, double tol) {
  std::vector<Interval> out;
  if (!(h.t0_s < h.t1_s)) return out;
  auto edge = [&](double lo, double hi, bool lo_state) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) == lo_state ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double t_prev = h.t0_s;
  bool prev = pred(t_prev);
  double open = prev ? h.t0_s : 0.0;
  for (long i = 1;; ++i) {
    const double t = std::min(h.t0_s + static_cast<double>(i) * step, h.t1_s);
    const bool cur = pred(t);
    if (cur != prev) {
      const double e = edge(t_prev, t, prev);
      if (cur) {
        open = e;
      } else if (e > open) {
        out.push_back({open, e});
      }
    }
    prev = cur;
    t_prev = t;
    if (t >= h.t1_s) break;
  }
  if (prev && h.t1_s > open) out.push_back({open, h.t1_s});
  return out;
}

}  // namespace

ContactTimeline::ContactTimeline(std::vector<SatelliteId> satellites,
                                 std::vector<std::string> stations, Horizon horizon)
    : sats_(std::move(satellites)),
      stations_(std::move(stations)),
      horizon_(horizon),
      ground_(sats_.size()),
      max_len_(sats_.size(), 0.0) {
  if (!(horizon_.t0_s <= horizon_.t1_s)) throw ValidationError("horizon end precedes start");
}

int ContactTimeline::index_of(const SatelliteId& id) const {
  auto it = std::find(sats_.begin(), sats_.end(), id);
  if (it == sats_.end()) throw std::out_of_range("unknown satellite " + id.str());
  return static_cast<int>(it - sats_.begin());
}

void ContactTimeline::add_ground_windows(int sat, int station, std::vector<Interval> windows) {
  if (sat < 0 || sat >= num_satellites() || station < 0 ||
      station >= static_cast<int>(stations_.size()))
    throw std::out_of_range("add_ground_windows: index out of range");
  const std::string what = sats_[sat].str() + "/" + stations_[station];
  check_windows(windows, horizon_, what);
  auto& list = ground_[sat];
  for (const auto& w : list) {
    if (w.peer.index != station) continue;
    for (const auto& n : windows)
      if (n.start_s < w.end_s && w.start_s < n.end_s)
        throw ValidationError(what + ": overlapping windows");
  }
  for (const auto& w : windows) {
    list.push_back({sats_[sat], {Counterpart::Kind::Station, station}, w.start_s, w.end_s});
    max_len_[sat] = std::max(max_len_[sat], w.duration());
  }
  std::sort(list.begin(), list.end(), [](const AccessWindow& a, const AccessWindow& b) {
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return a.peer.index < b.peer.index;
  });
}

void ContactTimeline::add_link_windows(int sat_a, int sat_b, std::vector<Interval> windows) {
  if (sat_a == sat_b) throw std::invalid_argument("a satellite cannot link to itself");
  if (sat_a < 0 || sat_b < 0 || sat_a >= num_satellites() || sat_b >= num_satellites())
    throw std::out_of_range("add_link_windows: index out of range");
  if (sat_a > sat_b) std::swap(sat_a, sat_b);
  auto& list = links_[{sat_a, sat_b}];
  list.insert(list.end(), windows.begin(), windows.end());
  std::sort(list.begin(), list.end(),
            [](const Interval& a, const Interval& b) { return a.start_s < b.start_s; });
  check_windows(list, horizon_, sats_[sat_a].str() + "/" + sats_[sat_b].str());
}

std::vector<Interval> ContactTimeline::windows(int sat, int station) const {
  std::vector<Interval> out;
  for (const auto& w : ground_.at(sat))
    if (w.peer.index == station) out.push_back({w.start_s, w.end_s});
  return out;
}

std::span<const Interval> ContactTimeline::link_windows(int sat_a, int sat_b) const {
  if (sat_a > sat_b) std::swap(sat_a, sat_b);
  auto it = links_.find({sat_a, sat_b});
  if (it == links_.end()) return {};
  return it->second;
}

bool ContactTimeline::link_up(int sat_a, int sat_b, double t) const {
  auto w = link_windows(sat_a, sat_b);
  auto it = std::upper_bound(w.begin(), w.end(), t,
                             [](double v, const Interval& i) { return v < i.start_s; });
  return it != w.begin() && std::prev(it)->contains(t);
}

std::optional<AccessWindow> ContactTimeline::next_contact(int sat, double t) const {
  const auto& list = ground_.at(sat);
  // Windows starting before t - max_len cannot still be open at t.
  auto it = std::lower_bound(list.begin(), list.end(), t - max_len_[sat],
                             [](const AccessWindow& w, double v) { return w.start_s < v; });
  for (; it != list.end(); ++it)
    if (it->end_s > t) return *it;
  return std::nullopt;
}

std::optional<AccessWindow> ContactTimeline::next_contact_starting(int sat, double t) const {
  const auto& list = ground_.at(sat);
  auto it = std::lower_bound(list.begin(), list.end(), t,
                             [](const AccessWindow& w, double v) { return w.start_s < v; });
  if (it == list.end()) return std::nullopt;
  return *it;
}

ContactTimeline ContactTimeline::with_first_stations(int n) const {
  if (n < 0 || n > static_cast<int>(stations_.size()))
    throw std::out_of_range("with_first_stations: bad station count");
  ContactTimeline out(sats_, {stations_.begin(), stations_.begin() + n}, horizon_);
  for (int k = 0; k < num_satellites(); ++k) {
    for (const auto& w : ground_[k]) {
      if (w.peer.index >= n) continue;
      out.ground_[k].push_back(w);
      out.max_len_[k] = std::max(out.max_len_[k], w.duration());
    }
  }
  out.links_ = links_;
  return out;
}

size_t ContactTimeline::total_ground_windows() const {
  size_t n = 0;
  for (const auto& g : ground_) n += g.size();
  return n;
}

std::vector<Interval> scan_windows(const OrbitSpec& orbit, const GroundStation& gs,
                                   Horizon horizon, const ScanParams& params,
                                   const EarthModel& earth) {
  if (!(params.coarse_step_s > 0.0) || !(params.refine_tol_s > 0.0))
    throw std::invalid_argument("scan_windows: step and tolerance must be positive");
  auto visible = [&](double t) {
    return elevation_angle(propagate(orbit, t, earth),
                           station_position_eci(gs, t, earth, params.gmst0_rad)) >=
           params.min_elevation_rad;
  };
  return scan_predicate(visible, horizon, params.coarse_step_s, params.refine_tol_s);
}

std::vector<Interval> scan_intersat_windows(const OrbitSpec& a, const OrbitSpec& b,
                                            Horizon horizon, const EarthModel& earth,
                                            double coarse_step_s, double refine_tol_s) {
  if (!(coarse_step_s > 0.0) || !(refine_tol_s > 0.0))
    throw std::invalid_argument("scan_intersat_windows: step and tolerance must be positive");
  if (a.semi_major_axis_km == b.semi_major_axis_km && a.inclination_rad == b.inclination_rad &&
      a.raan_rad == b.raan_rad && a.true_anomaly_epoch_rad == b.true_anomaly_epoch_rad &&
      a.arg_perigee_rad == b.arg_perigee_rad)
    throw std::invalid_argument("scan_intersat_windows: satellite paired with itself");
  auto visible = [&](double t) {
    return is_visible_intersat(propagate(a, t, earth), propagate(b, t, earth), earth);
  };
  return scan_predicate(visible, horizon, coarse_step_s, refine_tol_s);
}

std::vector<std::pair<int, int>> adjacent_pairs(const std::vector<SatelliteId>& sats) {
  std::map<int, std::vector<std::pair<int, int>>> by_cluster;  // cluster -> (slot, index)
  for (int k = 0; k < static_cast<int>(sats.size()); ++k)
    by_cluster[sats[k].cluster].push_back({sats[k].slot, k});
  std::set<std::pair<int, int>> pairs;
  for (auto& [cluster, members] : by_cluster) {
    std::sort(members.begin(), members.end());
    const size_t n = members.size();
    if (n < 2) continue;
    for (size_t i = 0; i < n; ++i) {
      int a = members[i].second, b = members[(i + 1) % n].second;
      pairs.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return {pairs.begin(), pairs.end()};
}

ContactTimeline build_contact_timeline(const std::vector<ConstellationMember>& members,
                                       const std::vector<GroundStation>& stations,
                                       Horizon horizon, const ScanParams& params,
                                       const EarthModel& earth, bool intra_cluster_links,
                                       Exec exec) {
  std::vector<SatelliteId> ids;
  for (const auto& m : members) ids.push_back(m.id);
  std::vector<std::string> names;
  for (const auto& s : stations) names.push_back(s.name);
  ContactTimeline timeline(ids, names, horizon);

  const auto links = intra_cluster_links ? adjacent_pairs(ids) : std::vector<std::pair<int, int>>{};
  const long n_ground = static_cast<long>(members.size() * stations.size());
  const long n_jobs = n_ground + static_cast<long>(links.size());
  std::vector<std::vector<Interval>> results(static_cast<size_t>(n_jobs));

  auto job = [&](long j) {
    if (j < n_ground) {
      const auto& m = members[static_cast<size_t>(j) / stations.size()];
      const auto& gs = stations[static_cast<size_t>(j) % stations.size()];
      results[j] = scan_windows(m.orbit, gs, horizon, params, earth);
    } else {
      const auto& [a, b] = links[static_cast<size_t>(j - n_ground)];
      results[j] = scan_intersat_windows(members[a].orbit, members[b].orbit, horizon, earth,
                                         params.coarse_step_s, params.refine_tol_s);
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < n_jobs; ++j) job(j);
  } else {
    for (long j = 0; j < n_jobs; ++j) job(j);
  }

  for (long j = 0; j < n_ground; ++j)
    timeline.add_ground_windows(static_cast<int>(j / static_cast<long>(stations.size())),
                                static_cast<int>(j % static_cast<long>(stations.size())),
                                std::move(results[j]));
  for (size_t l = 0; l < links.size(); ++l)
    if (!results[n_ground + l].empty())
      timeline.add_link_windows(links[l].first, links[l].second,
                                std::move(results[n_ground + l]));
  return timeline;
}

std::optional<AccessWindow> next_contact(const ContactTimeline& timeline, const SatelliteId& sat,
                                         double t) {
  return timeline.next_contact(timeline.index_of(sat), t);
}

std::optional<RoundTrip> round_trip_score(const ContactTimeline& timeline, int sat, double t_now,
                                          double training_duration_s) {
  if (training_duration_s < 0.0) throw std::invalid_argument("training duration must be >= 0");
  auto rx = timeline.next_contact(sat, t_now);
  if (!rx) return std::nullopt;
  const double t_rx = std::max(rx->start_s, t_now);
  auto tx = timeline.next_contact_starting(sat, t_rx + training_duration_s);
  if (!tx) return std::nullopt;
  RoundTrip rt;
  rt.t_rx = t_rx;
  rt.t_tx = tx->start_s;
  rt.score_s = (t_rx - t_now) + (tx->start_s - (t_rx + training_duration_s));
  return rt;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRow {
  SatelliteId sat;
  std::string counterpart;
  double start_s;
  double end_s;
};

std::string fmt_time(double t) { return fmt::format("{:.3f}", t); }

}  // namespace

void write_windows_csv(const ContactTimeline& timeline, std::ostream& out) {
  std::vector<CsvRow> rows;
  const auto& sats = timeline.satellites();
  for (int k = 0; k < timeline.num_satellites(); ++k)
    for (const auto& w : timeline.ground_windows(k))
      rows.push_back({sats[k], station_key(timeline.stations()[w.peer.index]), w.start_s, w.end_s});
  for (const auto& [pair, list] : timeline.links())
    for (const auto& w : list)
      rows.push_back({sats[pair.first], sats[pair.second].str(), w.start_s, w.end_s});
  std::sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    if (a.sat != b.sat) return a.sat < b.sat;
    if (a.counterpart != b.counterpart) return a.counterpart < b.counterpart;
    return a.start_s < b.start_s;
  });
  out << "sat_id,counterpart,start_s,end_s\n";
  for (const auto& r : rows)
    out << r.sat.str() << ',' << r.counterpart << ',' << fmt_time(r.start_s) << ','
        << fmt_time(r.end_s) << '\n';
}

void export_windows_csv(const ContactTimeline& timeline, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_windows_csv(timeline, out);
}

ContactTimeline read_windows_csv(std::istream& in, const std::string& source_name,
                                 const CsvImportOptions& options) {
  auto fail = [&](int line, const std::string& msg) -> ParseError {
    return ParseError(source_name + ":" + std::to_string(line) + ": " + msg);
  };
  auto parse_sat = [&](const std::string& s, int line) -> std::optional<SatelliteId> {
    if (!s.empty() && s[0] == 'c') {
      try {
        return SatelliteId::parse(s);
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    }
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const int k = std::stoi(s);
      if (options.sats_per_cluster > 0)
        return SatelliteId{k / options.sats_per_cluster, k % options.sats_per_cluster};
      return SatelliteId{0, k};
    }
    (void)line;
    return std::nullopt;
  };

  struct Raw {
    SatelliteId sat;
    std::optional<SatelliteId> peer_sat;
    std::string station;
    Interval w;
    int line;
  };
  std::vector<Raw> raws;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "sat_id,counterpart,start_s,end_s")
        throw fail(lineno, "expected header 'sat_id,counterpart,start_s,end_s'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 4) throw fail(lineno, "expected 4 columns");
    auto sat = parse_sat(cols[0], lineno);
    if (!sat) throw fail(lineno, "bad sat_id '" + cols[0] + "'");
    Raw r{*sat, std::nullopt, {}, {}, lineno};
    if (auto peer = parse_sat(cols[1], lineno); peer && cols[1][0] == 'c')
      r.peer_sat = peer;
    else if (cols[1].empty())
      throw fail(lineno, "empty counterpart");
    else
      r.station = cols[1];
    try {
      size_t used = 0;
      r.w.start_s = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
      r.w.end_s = std::stod(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail(lineno, "bad time value");
    }
    if (!std::isfinite(r.w.start_s) || !std::isfinite(r.w.end_s))
      throw fail(lineno, "non-finite time value");
    raws.push_back(std::move(r));
  }
  if (!header_seen) throw fail(lineno, "missing header");

  std::set<SatelliteId> sat_set;
  std::vector<std::string> unknown_stations;
  std::set<std::string> used_keys;
  for (const auto& r : raws) {
    sat_set.insert(r.sat);
    if (r.peer_sat) sat_set.insert(*r.peer_sat);
    else used_keys.insert(r.station);
  }
  std::vector<std::string> station_names;  // keys as written in the file
  for (const auto& gs : options.catalog)
    if (used_keys.count(station_key(gs.name))) station_names.push_back(station_key(gs.name));
  for (const auto& r : raws)
    if (!r.peer_sat && std::find(station_names.begin(), station_names.end(), r.station) ==
                           station_names.end())
      station_names.push_back(r.station);

  Horizon h{0.0, 0.0};
  if (options.horizon) {
    h = *options.horizon;
  } else {
    for (const auto& r : raws) h.t1_s = std::max(h.t1_s, r.w.end_s);
  }
  std::vector<SatelliteId> sats(sat_set.begin(), sat_set.end());
  // Display names from the catalog when available.
  std::vector<std::string> display = station_names;
  for (auto& name : display)
    for (const auto& gs : options.catalog)
      if (station_key(gs.name) == name) name = gs.name;
  ContactTimeline timeline(sats, display, h);

  std::map<std::pair<int, int>, std::vector<Interval>> ground, links;
  auto sat_index = [&](const SatelliteId& id) {
    return static_cast<int>(std::lower_bound(sats.begin(), sats.end(), id) - sats.begin());
  };
  for (const auto& r : raws) {
    const int a = sat_index(r.sat);
    if (r.peer_sat) {
      int b = sat_index(*r.peer_sat);
      if (a == b) throw ValidationError(source_name + ":" + std::to_string(r.line) +
                                        ": satellite linked to itself");
      links[{std::min(a, b), std::max(a, b)}].push_back(r.w);
    } else {
      const int s = static_cast<int>(
          std::find(station_names.begin(), station_names.end(), r.station) -
          station_names.begin());
      auto& list = ground[{a, s}];
      if (!list.empty() && r.w.start_s < list.back().end_s)
        throw ValidationError(source_name + ":" + std::to_string(r.line) +
                              ": windows unsorted or overlapping");
      list.push_back(r.w);
    }
  }
  for (auto& [key, list] : ground) timeline.add_ground_windows(key.first, key.second, list);
  for (auto& [key, list] : links) timeline.add_link_windows(key.first, key.second, list);
  return timeline;
}

ContactTimeline import_windows_csv(const std::string& path, const CsvImportOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_windows_csv(in, path, options);
}

}  // namespace satfl
