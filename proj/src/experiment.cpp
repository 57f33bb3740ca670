#include "satfl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "satfl/errors.hpp"
#include "satfl/ground_stations.hpp"

namespace satfl {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

Profile parse_profile(std::string_view name) {
  if (name == "desk") return Profile::Desk;
  if (name == "paper") return Profile::Paper;
  throw ConfigError("unknown profile '" + std::string(name) + "' (valid: desk, paper)");
}

const char* to_string(Profile p) { return p == Profile::Desk ? "desk" : "paper"; }

std::string SweepCell::key() const {
  return fmt::format("{}_c{}_s{}_g{}", variant, clusters, sats_per_cluster, stations);
}

std::vector<SweepCell> SweepSpec::cells() const {
  std::vector<SweepCell> out;
  const auto names = variants.empty()
                         ? std::vector<std::string>(variant_names().begin(), variant_names().end())
                         : variants;
  for (const auto& v : names)
    for (int c : clusters)
      for (int s : sats_per_cluster)
        for (int g : stations) out.push_back({c, s, g, v});
  return out;
}

size_t SweepSpec::cell_count() const {
  const size_t nv = variants.empty() ? variant_names().size() : variants.size();
  return nv * clusters.size() * sats_per_cluster.size() * stations.size();
}

void SweepSpec::validate() const {
  if (clusters.empty() || sats_per_cluster.empty() || stations.empty() || seeds.empty())
    throw ConfigError("sweep axes and seeds must be non-empty");
  for (int c : clusters)
    if (c < 1) throw ConfigError("sweep clusters must be >= 1");
  for (int s : sats_per_cluster)
    if (s < 1) throw ConfigError("sweep sats_per_cluster must be >= 1");
  for (int g : stations)
    if (!is_valid_station_count(g))
      throw ConfigError(fmt::format("sweep station count {} is not one of 1,2,3,5,10,13", g));
  for (const auto& v : variants) {
    try {
      StrategyConfig::from_variant(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

SweepSpec paper_sweep() {
  SweepSpec s;
  s.clusters = {1, 2, 5, 10};
  s.sats_per_cluster = {1, 2, 5, 10};
  s.stations = {1, 2, 3, 5, 10, 13};
  return s;
}

SweepSpec desk_sweep() { return SweepSpec{}; }

// --- config parsing -------------------------------------------------------------

namespace {

const std::set<std::string> kKnownKeys{
    "profile",       "algorithm",       "schedule",         "schedule_v2",    "intra_cc",
    "clusters",      "sats_per_cluster", "altitude_km",     "inclination_deg", "stations",
    "start",         "end",             "horizon_days",     "max_rounds",     "seed",
    "flops_rate",    "flops_per_epoch", "bandwidth_bps",    "C",              "B",
    "E",             "eta",             "mu_prox",          "buffer_size",    "staleness_max",
    "min_epochs",    "max_local_epochs", "client_eval",     "min_elevation_deg", "scan_step_s",
    "dataset",       "holdout_fraction", "sweep"};

const std::set<std::string> kSweepKeys{"clusters", "sats_per_cluster", "stations", "variants",
                                       "seeds"};

std::chrono::sys_days parse_date(const std::string& s, const std::string& key) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3)
    throw ConfigError(key + ": expected YYYY-MM-DD, got '" + s + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ConfigError(key + ": invalid calendar date '" + s + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days d) {
  const std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

class Reader {
 public:
  Reader(const json& doc, std::string source) : doc_(doc), source_(std::move(source)) {}

  template <typename T>
  void get(const char* key, T& target) const {
    if (!doc_.contains(key)) return;
    const auto& v = doc_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(key, "expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(key, "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v.get<long long>() < 0) fail(key, "expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(key, "expected a number");
      } else {
        if (!v.is_string()) fail(key, "expected a string");
      }
      target = v.get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }

  template <typename T>
  void get_list(const json& obj, const char* key, std::vector<T>& target) const {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(key, "expected a list");
    std::vector<T> out;
    for (const auto& item : v) {
      if constexpr (std::is_integral_v<T>) {
        if (!item.is_number_integer()) fail(key, "expected a list of integers");
        if constexpr (std::is_unsigned_v<T>)
          if (item.get<long long>() < 0) fail(key, "expected non-negative integers");
      } else {
        if (!item.is_string()) fail(key, "expected a list of strings");
      }
      out.push_back(item.get<T>());
    }
    target = std::move(out);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(source_ + ": " + key + ": " + msg);
  }

 private:
  const json& doc_;
  std::string source_;
};

Algorithm parse_algorithm(const std::string& name) {
  if (name == "fedavg") return Algorithm::FedAvg;
  if (name == "fedprox") return Algorithm::FedProx;
  if (name == "fedbuff") return Algorithm::FedBuff;
  throw ConfigError("algorithm: unknown '" + name + "' (valid: fedavg, fedprox, fedbuff)");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FedAvg: return "fedavg";
    case Algorithm::FedProx: return "fedprox";
    case Algorithm::FedBuff: return "fedbuff";
  }
  return "?";
}

std::string dataset_string(const DatasetSpec& d) {
  if (d.kind == DatasetSpec::Kind::Femnist) return "femnist:" + d.path;
  const auto& s = d.synthetic;
  return fmt::format(
      "synthetic:classes={},dim={},skew={},class_sep={},noise={},writer_shift={},min_samples={},"
      "max_samples={}",
      s.n_classes, s.dim, s.skew, s.class_sep, s.noise, s.writer_shift, s.min_samples,
      s.max_samples);
}

}  // namespace

DatasetSpec parse_dataset(std::string_view spec) {
  DatasetSpec d;
  const std::string s(spec);
  if (s.rfind("femnist:", 0) == 0) {
    d.kind = DatasetSpec::Kind::Femnist;
    d.path = s.substr(8);
    if (d.path.empty()) throw ConfigError("dataset: femnist needs a path (femnist:<dir>)");
    return d;
  }
  if (s != "synthetic" && s.rfind("synthetic:", 0) != 0)
    throw ConfigError("dataset: expected 'synthetic[:k=v,...]' or 'femnist:<path>', got '" + s +
                      "'");
  if (s == "synthetic") return d;
  std::stringstream items(s.substr(10));
  std::string item;
  auto& p = d.synthetic;
  while (std::getline(items, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("dataset: expected k=v, got '" + item + "'");
    const std::string k = item.substr(0, eq), v = item.substr(eq + 1);
    size_t used = 0;
    double num = 0;
    try {
      num = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty())
      throw ConfigError("dataset: value for '" + k + "' is not a number");
    const auto as_int = [&] {
      if (num != std::floor(num)) throw ConfigError("dataset: '" + k + "' must be an integer");
      return static_cast<int>(num);
    };
    if (k == "classes") p.n_classes = as_int();
    else if (k == "dim") p.dim = as_int();
    else if (k == "skew") p.skew = num;
    else if (k == "class_sep") p.class_sep = num;
    else if (k == "noise") p.noise = num;
    else if (k == "writer_shift") p.writer_shift = num;
    else if (k == "min_samples") p.min_samples = as_int();
    else if (k == "max_samples") p.max_samples = as_int();
    else
      throw ConfigError("dataset: unknown synthetic parameter '" + k + "'");
  }
  return d;
}

ExperimentConfig parse_config_text(std::string_view text, const ConfigOverrides& overrides,
                                   const std::string& source) {
  json doc = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
  for (const auto& [k, v] : doc.items())
    if (!kKnownKeys.count(k)) throw ConfigError(source + ": unknown key '" + k + "'");

  const Reader r(doc, source);
  ExperimentConfig ec;
  std::string profile = "desk";
  r.get("profile", profile);
  ec.profile = overrides.profile ? *overrides.profile : parse_profile(profile);

  SimConfig& c = ec.run;
  r.get("clusters", c.constellation.n_clusters);
  r.get("sats_per_cluster", c.constellation.sats_per_cluster);
  r.get("altitude_km", c.constellation.altitude_km);
  double incl_deg = 90.0;
  r.get("inclination_deg", incl_deg);
  c.constellation.inclination_rad = deg2rad(incl_deg);
  r.get("stations", c.stations);
  if (!is_valid_station_count(c.stations))
    throw ConfigError(fmt::format("{}: stations={} is invalid (valid: 1, 2, 3, 5, 10, 13)", source,
                                  c.stations));

  std::string start = "2024-04-14";
  r.get("start", start);
  c.start = parse_date(start, "start");
  if (doc.contains("end") && doc.contains("horizon_days"))
    throw ConfigError(source + ": give either end or horizon_days, not both");
  if (doc.contains("end")) {
    std::string end;
    r.get("end", end);
    c.end = parse_date(end, "end");
  } else {
    int days = ec.profile == Profile::Desk ? 7 : 0;
    r.get("horizon_days", days);
    if (doc.contains("horizon_days") && days < 1) r.fail("horizon_days", "must be >= 1");
    c.end = days > 0 ? c.start + std::chrono::days{days} : parse_date("2024-07-13", "end");
  }

  r.get("max_rounds", c.max_rounds);
  r.get("seed", c.seed);
  r.get("flops_rate", c.flops_rate);
  r.get("flops_per_epoch", c.flops_per_epoch);
  r.get("bandwidth_bps", c.bandwidth_bps);
  r.get("C", c.hp.C);
  r.get("B", c.hp.B);
  r.get("E", c.hp.E);
  r.get("eta", c.hp.eta);
  r.get("mu_prox", c.hp.mu_prox);
  r.get("buffer_size", c.hp.buffer_size);
  r.get("staleness_max", c.hp.staleness_max);
  r.get("min_epochs", c.hp.min_epochs);
  r.get("max_local_epochs", c.hp.max_local_epochs);
  r.get("client_eval", c.client_eval);
  double elev = 10.0;
  r.get("min_elevation_deg", elev);
  c.scan.min_elevation_rad = deg2rad(elev);
  r.get("scan_step_s", c.scan.coarse_step_s);
  r.get("holdout_fraction", c.dataset.holdout_fraction);
  std::string dataset = "synthetic";
  r.get("dataset", dataset);
  if (overrides.dataset) dataset = *overrides.dataset;
  const double holdout = c.dataset.holdout_fraction;
  c.dataset = parse_dataset(dataset);
  c.dataset.holdout_fraction = holdout;
  if (overrides.seed) c.seed = *overrides.seed;

  std::string algorithm = "fedavg";
  r.get("algorithm", algorithm);
  c.strategy.algorithm = parse_algorithm(algorithm);
  r.get("schedule", c.strategy.schedule);
  r.get("schedule_v2", c.strategy.schedule_v2);
  r.get("intra_cc", c.strategy.intra_cc);

  try {
    c.strategy.validate();
    if (c.strategy.schedule_v2) c.strategy = enforce_min_epochs(c.strategy, c.hp.min_epochs);
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }

  ec.sweep = ec.profile == Profile::Paper ? paper_sweep() : desk_sweep();
  if (doc.contains("sweep")) {
    const auto& sw = doc.at("sweep");
    if (!sw.is_object()) r.fail("sweep", "expected an object");
    for (const auto& [k, v] : sw.items())
      if (!kSweepKeys.count(k)) throw ConfigError(source + ": unknown sweep key '" + k + "'");
    r.get_list(sw, "clusters", ec.sweep.clusters);
    r.get_list(sw, "sats_per_cluster", ec.sweep.sats_per_cluster);
    r.get_list(sw, "stations", ec.sweep.stations);
    r.get_list(sw, "variants", ec.sweep.variants);
    r.get_list(sw, "seeds", ec.sweep.seeds);
  }
  if (overrides.seed) ec.sweep.seeds = {*overrides.seed};
  ec.sweep.validate();
  return ec;
}

ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
  if (path.empty()) return parse_config_text("", overrides, "<defaults>");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides, path);
}

ordered_json resolved_settings(const SimConfig& c) {
  ordered_json j;
  j["algorithm"] = algorithm_name(c.strategy.algorithm);
  j["schedule"] = c.strategy.schedule;
  j["schedule_v2"] = c.strategy.schedule_v2;
  j["intra_cc"] = c.strategy.intra_cc;
  j["variant"] = c.strategy.variant_name();
  j["clusters"] = c.constellation.n_clusters;
  j["sats_per_cluster"] = c.constellation.sats_per_cluster;
  j["altitude_km"] = c.constellation.altitude_km;
  j["inclination_deg"] = rad2deg(c.constellation.inclination_rad);
  j["stations"] = c.stations;
  j["start"] = format_date(c.start);
  j["end"] = format_date(c.end);
  j["max_rounds"] = c.max_rounds;
  j["seed"] = c.seed;
  j["flops_rate"] = c.flops_rate;
  j["flops_per_epoch"] = c.flops_per_epoch;
  j["bandwidth_bps"] = c.bandwidth_bps;
  j["C"] = c.hp.C;
  j["B"] = c.hp.B;
  j["E"] = c.hp.E;
  j["eta"] = c.hp.eta;
  j["mu_prox"] = c.hp.mu_prox;
  j["buffer_size"] = c.hp.buffer_size;
  j["staleness_max"] = c.hp.staleness_max;
  j["min_epochs"] = c.hp.min_epochs;
  j["max_local_epochs"] = c.hp.max_local_epochs;
  j["client_eval"] = c.client_eval;
  j["min_elevation_deg"] = rad2deg(c.scan.min_elevation_rad);
  j["scan_step_s"] = c.scan.coarse_step_s;
  j["dataset"] = dataset_string(c.dataset);
  j["holdout_fraction"] = c.dataset.holdout_fraction;
  return j;
}

std::vector<std::string> header_lines(const SimConfig& cfg) {
  std::vector<std::string> out;
  const auto settings = resolved_settings(cfg);
  for (const auto& [k, v] : settings.items())
    out.push_back(k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()));
  return out;
}

// --- sweep ------------------------------------------------------------------------------

SimConfig cell_config(const SimConfig& base, const SweepCell& cell, std::uint64_t seed) {
  SimConfig c = base;
  c.constellation.n_clusters = cell.clusters;
  c.constellation.sats_per_cluster = cell.sats_per_cluster;
  c.stations = cell.stations;
  c.strategy = StrategyConfig::from_variant(cell.variant, base.hp.min_epochs);
  c.seed = seed;
  return c;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg, int parallelism) {
  const auto cells = cfg.sweep.cells();
  std::map<std::pair<int, int>, ContactTimeline> windows;
  for (const auto& cell : cells) {
    const auto shape = std::make_pair(cell.clusters, cell.sats_per_cluster);
    if (windows.count(shape)) continue;
    ConstellationSpec cs = cfg.run.constellation;
    cs.n_clusters = cell.clusters;
    cs.sats_per_cluster = cell.sats_per_cluster;
    windows[shape] = build_contact_timeline(build_constellation(cs), default_station_catalog(),
                                            {0.0, cfg.run.horizon_s()}, cfg.run.scan,
                                            cfg.run.earth, true, Exec::Parallel);
  }

  std::vector<RunRecord> runs;
  for (const auto& cell : cells)
    for (auto seed : cfg.sweep.seeds) runs.push_back({cell, seed, std::nullopt, {}});

  const long n = static_cast<long>(runs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, parallelism))
  for (long i = 0; i < n; ++i) {
    auto& run = runs[static_cast<size_t>(i)];
    try {
      SimConfig c = cell_config(cfg.run, run.cell, run.seed);
      c.exec = Exec::Serial;
      const auto& tl = windows.at({run.cell.clusters, run.cell.sats_per_cluster});
      const auto inputs = prepare_inputs(c, &tl);
      run.log = run_simulation(c, inputs);
    } catch (const std::exception& e) {
      run.error = e.what();
    }
  }
  return runs;
}

// --- run logs ---------------------------------------------------------------------------

ordered_json run_to_json(const RunRecord& run) {
  ordered_json j;
  j["cell"] = {{"variant", run.cell.variant},
               {"clusters", run.cell.clusters},
               {"sats_per_cluster", run.cell.sats_per_cluster},
               {"stations", run.cell.stations}};
  j["seed"] = run.seed;
  j["error"] = run.error;
  if (!run.log) {
    j["log"] = nullptr;
    return j;
  }
  const auto& log = *run.log;
  ordered_json l;
  l["variant"] = log.variant;
  l["t0"] = log.t0;
  l["t_stop"] = log.t_stop;
  l["cannot_perform_fl"] = log.cannot_perform_fl;
  l["incomplete_round"] = log.incomplete_round;
  l["discarded_stale"] = log.discarded_stale;
  l["summary"] = {{"max_accuracy", log.max_accuracy()},
                  {"mean_round_duration_h", log.mean_round_duration_h()},
                  {"idle_s_per_satellite_per_hour", log.idle_s_per_satellite_per_hour()}};
  l["satellites"] = ordered_json::array();
  for (size_t k = 0; k < log.satellites.size(); ++k) {
    const auto& t = log.totals.at(k);
    l["satellites"].push_back({{"id", log.satellites[k].str()},
                               {"idle", t.idle},
                               {"rx", t.rx},
                               {"tx", t.tx},
                               {"compute", t.compute}});
  }
  l["rounds"] = ordered_json::array();
  for (const auto& r : log.rounds) {
    ordered_json rr;
    rr["round"] = r.round_idx;
    rr["t_start"] = r.t_start;
    rr["t_end"] = r.t_end;
    rr["duration_s"] = r.duration_s;
    rr["accuracy"] = r.accuracy;
    rr["loss"] = r.loss;
    rr["participants"] = ordered_json::array();
    for (const auto& p : r.participants) rr["participants"].push_back(p.str());
    rr["epochs"] = r.epochs;
    if (r.client_accuracy) rr["client_accuracy"] = *r.client_accuracy;
    l["rounds"].push_back(std::move(rr));
  }
  j["log"] = std::move(l);
  return j;
}

RunRecord run_from_json(const json& doc) {
  try {
    RunRecord run;
    const auto& c = doc.at("cell");
    run.cell = {c.at("clusters").get<int>(), c.at("sats_per_cluster").get<int>(),
                c.at("stations").get<int>(), c.at("variant").get<std::string>()};
    run.seed = doc.at("seed").get<std::uint64_t>();
    run.error = doc.value("error", "");
    const auto& l = doc.at("log");
    if (l.is_null()) return run;
    MetricsLog log;
    log.variant = l.at("variant").get<std::string>();
    log.t0 = l.at("t0").get<double>();
    log.t_stop = l.at("t_stop").get<double>();
    log.cannot_perform_fl = l.at("cannot_perform_fl").get<bool>();
    log.incomplete_round = l.at("incomplete_round").get<bool>();
    log.discarded_stale = l.at("discarded_stale").get<int>();
    for (const auto& s : l.at("satellites")) {
      log.satellites.push_back(SatelliteId::parse(s.at("id").get<std::string>()));
      log.totals.push_back({s.at("idle").get<double>(), s.at("rx").get<double>(),
                            s.at("tx").get<double>(), s.at("compute").get<double>()});
    }
    for (const auto& rr : l.at("rounds")) {
      RoundRecord r;
      r.round_idx = rr.at("round").get<int>();
      r.t_start = rr.at("t_start").get<double>();
      r.t_end = rr.at("t_end").get<double>();
      r.duration_s = rr.at("duration_s").get<double>();
      r.accuracy = rr.at("accuracy").get<double>();
      r.loss = rr.at("loss").get<double>();
      for (const auto& p : rr.at("participants"))
        r.participants.push_back(SatelliteId::parse(p.get<std::string>()));
      r.epochs = rr.at("epochs").get<std::vector<int>>();
      if (rr.contains("client_accuracy")) r.client_accuracy = rr.at("client_accuracy").get<double>();
      log.rounds.push_back(std::move(r));
    }
    run.log = std::move(log);
    return run;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run log: ") + e.what());
  }
}

void write_run_json(const RunRecord& run, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << run_to_json(run).dump(1) << '\n';
}

RunRecord read_run_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return run_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// --- reports ------------------------------------------------------------------------------

Metric parse_metric(std::string_view name) {
  if (name == "max_accuracy") return Metric::MaxAccuracy;
  if (name == "round_duration") return Metric::RoundDuration;
  if (name == "idle_time") return Metric::IdleTime;
  throw ConfigError("unknown metric '" + std::string(name) +
                    "' (valid: max_accuracy, round_duration, idle_time)");
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::MaxAccuracy: return "max_accuracy";
    case Metric::RoundDuration: return "round_duration";
    case Metric::IdleTime: return "idle_time";
  }
  return "?";
}

double metric_value(const MetricsLog& log, Metric m) {
  switch (m) {
    case Metric::MaxAccuracy: return log.max_accuracy();
    case Metric::RoundDuration: return log.mean_round_duration_h();
    case Metric::IdleTime: return log.idle_s_per_satellite_per_hour();
  }
  return 0.0;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  return fmt::format("{:.6g}", v);
}

HeatmapTable build_heatmap(const std::vector<RunRecord>& runs, Metric metric,
                           std::vector<std::string> header) {
  const auto names = variant_names();
  const auto rank = [&](const std::string& v) {
    return std::find(names.begin(), names.end(), v) - names.begin();
  };
  using Key = std::tuple<long, int, int, int>;
  std::map<Key, std::pair<HeatmapCell, std::vector<double>>> groups;
  for (const auto& run : runs) {
    const Key key{rank(run.cell.variant), run.cell.clusters, run.cell.sats_per_cluster,
                  run.cell.stations};
    auto& g = groups[key];
    g.first.variant = run.cell.variant;
    g.first.clusters = run.cell.clusters;
    g.first.sats_per_cluster = run.cell.sats_per_cluster;
    g.first.stations = run.cell.stations;
    if (run.log) g.second.push_back(metric_value(*run.log, metric));
  }
  HeatmapTable table;
  table.metric = to_string(metric);
  table.header = std::move(header);
  for (auto& [key, g] : groups) {
    auto cell = g.first;
    cell.n_seeds = static_cast<int>(g.second.size());
    double sum = 0.0;
    for (double v : g.second) sum += v;
    cell.mean = g.second.empty() ? std::nan("") : sum / static_cast<double>(g.second.size());
    if (metric == Metric::MaxAccuracy && cell.clusters * cell.sats_per_cluster == 1) cell.mean = 0.0;
    table.cells.push_back(cell);
  }
  return table;
}

namespace {
constexpr const char* kHeatmapColumns = "variant,clusters,sats_per_cluster,stations,mean,n_seeds";
}

void write_heatmap_csv(const HeatmapTable& table, std::ostream& out) {
  out << "# metric=" << table.metric << '\n';
  for (const auto& h : table.header) out << "# " << h << '\n';
  out << kHeatmapColumns << '\n';
  for (const auto& c : table.cells)
    out << c.variant << ',' << c.clusters << ',' << c.sats_per_cluster << ',' << c.stations << ','
        << format_number(c.mean) << ',' << c.n_seeds << '\n';
}

HeatmapTable read_heatmap_csv(std::istream& in, const std::string& source) {
  HeatmapTable t;
  std::string line;
  int lineno = 0;
  bool columns = false;
  const auto fail = [&](const std::string& msg) {
    return ParseError(fmt::format("{}:{}: {}", source, lineno, msg));
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!columns && line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      if (body.rfind("metric=", 0) == 0 && t.metric.empty())
        t.metric = body.substr(7);
      else
        t.header.push_back(body);
      continue;
    }
    if (!columns) {
      if (line != kHeatmapColumns) throw fail("expected column header '" + std::string(kHeatmapColumns) + "'");
      columns = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw fail("expected 6 fields");
    HeatmapCell c;
    try {
      c.variant = f[0];
      c.clusters = std::stoi(f[1]);
      c.sats_per_cluster = std::stoi(f[2]);
      c.stations = std::stoi(f[3]);
      c.mean = f[4] == "nan" ? std::nan("") : std::stod(f[4]);
      c.n_seeds = std::stoi(f[5]);
    } catch (const std::exception&) {
      throw fail("malformed number");
    }
    t.cells.push_back(c);
  }
  if (!columns) throw ParseError(source + ": missing column header");
  return t;
}

void write_line_csv(const MetricsLog& log, const std::vector<std::string>& header,
                    std::ostream& out) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "round,t_s,accuracy,round_duration_s\n";
  for (const auto& r : log.rounds)
    out << r.round_idx << ',' << format_number(r.t_end) << ',' << format_number(r.accuracy) << ','
        << format_number(r.duration_s) << '\n';
}

void emit_report(const std::vector<RunRecord>& runs, const std::vector<std::string>& header,
                 const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "lines");
  for (Metric m : {Metric::MaxAccuracy, Metric::RoundDuration, Metric::IdleTime}) {
    const auto path = fs::path(out_dir) / (std::string("heatmap_") + to_string(m) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_heatmap_csv(build_heatmap(runs, m, header), out);
  }
  for (const auto& run : runs) {
    if (!run.log) continue;
    const auto path =
        fs::path(out_dir) / "lines" / fmt::format("{}_seed{}.csv", run.cell.key(), run.seed);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_line_csv(*run.log, header, out);
  }
}

}  // namespace satfl
