// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "satfl/contact.hpp"
#include "satfl/experiment.hpp"
#include "satfl/ground_stations.hpp"
#include "satfl/training.hpp"

using namespace satfl;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs > limit_s) {
    o.pass = false;
    o.detail += fmt::format(" [over the {:.0f} s budget]", limit_s);
  }
  if (!o.pass) ++failures;
  fmt::print("{} {:>2} {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, secs);
  std::fflush(stdout);
}

// --- 1 ---------------------------------------------------------------------------

bool ring_links_persist(int n) {
  const auto sats = build_constellation({1, n, 500.0});
  const double T = orbital_period(sats[0].orbit.semi_major_axis_km);
  for (double t = 0; t <= T; t += 10.0)
    for (int k = 0; k < n; ++k)
      if (!is_visible_intersat(propagate(sats[k].orbit, t),
                               propagate(sats[(k + 1) % n].orbit, t)))
        return false;
  return true;
}

Outcome los_threshold() {
  std::string seen;
  int smallest = 0;
  bool monotone = true;
  bool prev = false;
  for (int n = 8; n <= 11; ++n) {
    const bool ok = ring_links_persist(n);
    seen += fmt::format("{}{}:{}", seen.empty() ? "" : " ", n, ok ? "up" : "down");
    if (ok && !smallest) smallest = n;
    if (prev && !ok) monotone = false;
    prev = ok;
  }
  return {smallest == 10 && monotone, fmt::format("minimum N = {} ({})", smallest, seen)};
}

// --- 2 ---------------------------------------------------------------------------

Outcome pass_envelope() {
  // Geometry oracle: static Earth, station on the ground track.
  const double r = EarthModel{}.radius_km + 500.0, R = EarthModel{}.radius_km;
  const double e = deg2rad(10.0);
  const double lambda = std::acos(R * std::cos(e) / r) - e;
  const double overhead_min = lambda / kPi * orbital_period(r) / 60.0;

  const auto tl = build_contact_timeline(build_constellation({2, 10, 500.0}),
                                         default_station_catalog(), {0.0, 3 * 86400.0}, {}, {},
                                         false, Exec::Parallel);
  double longest = 0.0, shortest = 1e9;
  size_t n = 0;
  for (int k = 0; k < tl.num_satellites(); ++k)
    for (const auto& w : tl.ground_windows(k)) {
      longest = std::max(longest, w.duration());
      shortest = std::min(shortest, w.duration());
      ++n;
    }
  const bool ok = n > 0 && shortest > 0.0 && longest <= 15 * 60.0 &&
                  std::abs(overhead_min - 7.4) <= 0.5 && std::abs(longest / 60.0 - 7.4) <= 0.5;
  return {ok, fmt::format("{} windows, shortest {:.2f} min, longest {:.3f} min, overhead oracle "
                          "{:.3f} min",
                          n, shortest / 60.0, longest / 60.0, overhead_min)};
}

// --- 3 ---------------------------------------------------------------------------

std::vector<Interval> brute_force(const OrbitSpec& o, const GroundStation& gs, Horizon h,
                                  const ScanParams& p) {
  std::vector<Interval> out;
  bool in = false;
  double open = 0;
  for (double t = h.t0_s; t <= h.t1_s; t += 1.0) {
    const bool vis = elevation_angle(propagate(o, t), station_position_eci(gs, t, {}, p.gmst0_rad)) >=
                     p.min_elevation_rad;
    if (vis && !in) open = t;
    if (!vis && in) out.push_back({open, t});
    in = vis;
  }
  if (in) out.push_back({open, h.t1_s});
  return out;
}

Outcome window_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& catalog = default_station_catalog();
  const Horizon h{0.0, 86400.0};
  int matched = 0, total = 0;
  double worst = 0.0;
  std::string problems;
  for (int trial = 0; trial < 20; ++trial) {
    OrbitSpec o;
    o.semi_major_axis_km = EarthModel{}.radius_km + 400.0 + 400.0 * u(rng);
    o.inclination_rad = deg2rad(30.0 + 70.0 * u(rng));
    o.raan_rad = kTwoPi * u(rng);
    o.true_anomaly_epoch_rad = kTwoPi * u(rng);
    const auto& gs = catalog[static_cast<size_t>(u(rng) * catalog.size()) % catalog.size()];
    ScanParams p;
    p.gmst0_rad = kTwoPi * u(rng);
    const auto fast = scan_windows(o, gs, h, p);
    const auto slow = brute_force(o, gs, h, p);
    total += static_cast<int>(slow.size());
    for (const auto& w : slow) {
      const auto it = std::find_if(fast.begin(), fast.end(), [&](const Interval& f) {
        return std::abs(f.start_s - w.start_s) < 1.1 && std::abs(f.end_s - w.end_s) < 1.1;
      });
      if (it == fast.end()) {
        problems += fmt::format(" [trial {} {}: oracle window {:.0f}-{:.0f} unmatched]", trial,
                                gs.name, w.start_s, w.end_s);
        continue;
      }
      ++matched;
      worst = std::max({worst, std::abs(it->start_s - w.start_s), std::abs(it->end_s - w.end_s)});
    }
    if (fast.size() != slow.size())
      problems += fmt::format(" [trial {}: {} scanned vs {} oracle]", trial, fast.size(),
                              slow.size());
  }
  return {matched == total && problems.empty(),
          fmt::format("{}/{} oracle windows matched on 20 pairs, worst edge error {:.3f} s{}",
                      matched, total, worst, problems)};
}

// --- 4 ---------------------------------------------------------------------------

Outcome aggregation() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_int_distribution<int> count(1, 8), dim(1, 12), samples(1, 400);
  double worst = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = count(rng), d = dim(rng);
    std::vector<ModelParams> params;
    std::vector<size_t> n;
    for (int k = 0; k < m; ++k) {
      ModelParams p(static_cast<size_t>(d));
      for (auto& x : p.values) x = val(rng);
      params.push_back(p);
      n.push_back(static_cast<size_t>(samples(rng)));
    }
    std::vector<WeightedUpdate> ups;
    for (int k = 0; k < m; ++k) ups.push_back({&params[k], n[k]});
    const auto got = aggregate_weighted(ups);

    long double total = 0;
    for (auto x : n) total += x;
    for (int i = 0; i < d; ++i) {
      long double s = 0;
      for (int k = 0; k < m; ++k) s += static_cast<long double>(n[k]) * params[k].values[i];
      const double want = static_cast<double>(s / total);
      worst = std::max(worst, std::abs(got.values[i] - want) / std::max(1.0, std::abs(want)));
    }
    std::shuffle(ups.begin(), ups.end(), rng);
    const auto perm = aggregate_weighted(ups);
    for (int i = 0; i < d; ++i)
      worst_perm = std::max(worst_perm, std::abs(perm.values[i] - got.values[i]) /
                                            std::max(1.0, std::abs(got.values[i])));
  }
  return {worst <= 1e-12 && worst_perm <= 1e-12,
          fmt::format("1000 instances, worst relative error {:.2e}, permutation drift {:.2e}",
                      worst, worst_perm)};
}

// --- 5 ---------------------------------------------------------------------------

Outcome gradient_check() {
  const ModelSpec spec{784, {8}, 62};
  const Mlp model(spec);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);

  LocalDataset data;
  data.dim = 784;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 784; ++j) data.features.push_back(static_cast<float>(u01(rng)));
    data.labels.push_back(static_cast<int>(u01(rng) * 62) % 62);
  }
  std::vector<size_t> batch(16);
  std::iota(batch.begin(), batch.end(), 0);

  const size_t P = model.num_params();
  double worst = 0.0;
  for (int probe = 0; probe < 10; ++probe) {
    auto w = model.init_params(100 + probe).values;
    std::vector<double> anchor(P);
    for (auto& a : anchor) a = 0.1 * g(rng);
    for (double mu : {0.0, 0.3}) {
      const auto objective = [&](const std::vector<double>& x) {
        double prox = 0.0;
        for (size_t i = 0; i < P; ++i) prox += (x[i] - anchor[i]) * (x[i] - anchor[i]);
        return model.loss(x, data, batch) + 0.5 * mu * prox;
      };
      std::vector<double> grad(P);
      objective_gradient(model, w, anchor, mu, data, batch, grad);

      std::vector<double> dir(P);
      double norm = 0.0;
      for (auto& d : dir) norm += (d = g(rng)) * d;
      for (auto& d : dir) d /= std::sqrt(norm);
      const double h = 1e-5;
      auto plus = w, minus = w;
      for (size_t i = 0; i < P; ++i) {
        plus[i] += h * dir[i];
        minus[i] -= h * dir[i];
      }
      const double fd = (objective(plus) - objective(minus)) / (2 * h);
      const double an = std::inner_product(grad.begin(), grad.end(), dir.begin(), 0.0);
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-8));
    }
  }
  return {worst <= 1e-4,
          fmt::format("784-8-62 MLP, 10 probes x {{mu=0, mu=0.3}}, worst relative error {:.2e}",
                      worst)};
}

// --- 6 to 10 share desk-scale runs ---------------------------------------------------

class DeskRuns {
 public:
  DeskRuns() : base_(parse_config_text("").run) {
    windows_ = build_contact_timeline(build_constellation(base_.constellation),
                                      default_station_catalog(), {0.0, base_.horizon_s()},
                                      base_.scan, base_.earth, true, Exec::Parallel);
  }

  SimConfig config(const std::string& variant, int stations, std::uint64_t seed) const {
    return cell_config(base_, {base_.constellation.n_clusters,
                               base_.constellation.sats_per_cluster, stations, variant},
                       seed);
  }

  const MetricsLog& get(const std::string& variant, int stations, std::uint64_t seed) {
    const auto key = std::make_tuple(variant, stations, seed);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, fresh(variant, stations, seed)).first->second;
  }

  MetricsLog fresh(const std::string& variant, int stations, std::uint64_t seed) const {
    const auto cfg = config(variant, stations, seed);
    const auto inputs = prepare_inputs(cfg, &windows_);
    return run_simulation(cfg, inputs);
  }

  double mean_duration_h(const std::string& variant, int stations) {
    double s = 0.0;
    for (std::uint64_t seed : seeds) s += get(variant, stations, seed).mean_round_duration_h();
    return s / static_cast<double>(seeds.size());
  }

  const SimConfig& base() const { return base_; }
  static constexpr std::array<std::uint64_t, 5> seeds{0, 1, 2, 3, 4};

 private:
  SimConfig base_;
  ContactTimeline windows_;
  std::map<std::tuple<std::string, int, std::uint64_t>, MetricsLog> cache_;
};

Outcome convergence(DeskRuns& runs) {
  std::string accs;
  int above75 = 0;
  double mean = 0.0;
  for (auto seed : DeskRuns::seeds) {
    const double a = runs.get("fedavg", 13, seed).max_accuracy();
    accs += fmt::format("{}{:.3f}", accs.empty() ? "" : " ", a);
    above75 += a > 0.75;
    mean += a / 5.0;
  }
  return {above75 >= 4 && mean >= 0.80,
          fmt::format("fedavg 2x10, 13 stations, 7 days: max accuracy per seed [{}], mean {:.3f}",
                      accs, mean)};
}

Outcome scheduler(DeskRuns& runs) {
  const double base = runs.mean_duration_h("fedavg", 13);
  const double sch = runs.mean_duration_h("fedavg_sch", 13);
  const double ratio = sch / base;
  return {ratio <= 0.7, fmt::format("mean round duration {:.3f} h scheduled vs {:.3f} h, ratio "
                                    "{:.3f}",
                                    sch, base, ratio)};
}

Outcome stations(DeskRuns& runs) {
  std::map<int, double> d;
  std::string line;
  for (int g : {1, 3, 5, 10, 13}) {
    d[g] = runs.mean_duration_h("fedavg", g);
    line += fmt::format("{}{}:{:.3f}h", line.empty() ? "" : " ", g, d[g]);
  }
  const bool decreasing = d[1] > d[3] && d[3] > d[5];
  const double plateau = std::abs(d[10] - d[13]) / std::abs(d[1] - d[5]);
  return {decreasing && plateau < 0.2,
          fmt::format("{}; 10->13 change is {:.1f}% of the 1->5 change", line, 100 * plateau)};
}

Outcome idle_order(DeskRuns& runs) {
  const double avg = runs.get("fedavg", 13, 0).idle_fraction();
  const double prox = runs.get("fedprox", 13, 0).idle_fraction();
  const double buff = runs.get("fedbuff", 13, 0).idle_fraction();
  return {buff < prox && prox < avg,
          fmt::format("idle fraction fedbuff {:.4f} < fedprox {:.4f} < fedavg {:.4f}", buff, prox,
                      avg)};
}

std::string line_csv(const MetricsLog& log, const SimConfig& cfg) {
  std::ostringstream out;
  write_line_csv(log, header_lines(cfg), out);
  return out.str();
}

std::string heatmap_csvs(const std::vector<RunRecord>& runs, const std::vector<std::string>& h) {
  std::ostringstream out;
  for (Metric m : {Metric::MaxAccuracy, Metric::RoundDuration, Metric::IdleTime})
    write_heatmap_csv(build_heatmap(runs, m, h), out);
  return out.str();
}

Outcome determinism(DeskRuns& runs) {
  const auto cfg = runs.config("fedavg", 13, 0);
  const auto first = line_csv(runs.get("fedavg", 13, 0), cfg);
  const auto again = line_csv(runs.fresh("fedavg", 13, 0), cfg);

  auto ec = parse_config_text(R"({"clusters": 1, "sats_per_cluster": 5, "horizon_days": 2,
      "sweep": {"clusters": [1], "sats_per_cluster": [2, 5], "stations": [1, 3],
                "variants": ["fedavg_sch", "fedprox", "fedbuff"], "seeds": [0, 1]}})");
  const auto header = header_lines(ec.run);
  const auto a = heatmap_csvs(run_sweep(ec, 1), header);
  const auto b = heatmap_csvs(run_sweep(ec, 2), header);
  const bool ok = first == again && a == b && !first.empty();
  return {ok, fmt::format("run line CSV {} ({} bytes); sweep heatmaps {} ({} bytes)",
                          first == again ? "identical" : "DIFFERENT", first.size(),
                          a == b ? "identical" : "DIFFERENT", a.size())};
}

// --- 11 --------------------------------------------------------------------------------

Outcome sweep_shape(const std::string& cli) {
  FILE* pipe = popen((cli + " sweep --profile paper --dry-run").c_str(), "r");
  if (!pipe) return {false, "cannot start " + cli};
  std::vector<std::string> lines;
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) {
    std::string s(buf.data());
    if (!s.empty() && s.back() == '\n') s.pop_back();
    lines.push_back(s);
  }
  const int rc = pclose(pipe);
  if (rc != 0 || lines.empty()) return {false, fmt::format("exit status {}", rc)};

  const std::string summary = lines.back();
  lines.pop_back();
  std::set<std::string> unique(lines.begin(), lines.end());
  std::map<std::string, int> per_variant;
  for (const auto& l : lines) ++per_variant[l.substr(0, l.find("_c"))];
  const std::set<std::string> expected{"fedavg",  "fedavg_sch",     "fedavg_intra",  "fedprox",
                                       "fedprox_sch", "fedprox_sch_v2", "fedprox_intra", "fedbuff"};
  bool matrix = per_variant.size() == expected.size();
  for (const auto& [v, n] : per_variant) matrix = matrix && expected.count(v) && n == 96;
  const bool ok = lines.size() == 768 && unique.size() == 768 && matrix &&
                  summary.rfind("cells=768 ", 0) == 0;
  return {ok, fmt::format("{} cells ({} distinct), {} variants x 96 shapes; \"{}\"", lines.size(),
                          unique.size(), per_variant.size(), summary)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "satfl";

  criterion(1, "LOS cluster threshold", 1.0, los_threshold);
  criterion(2, "Pass-duration envelope", 30.0, pass_envelope);
  criterion(3, "Window oracle equivalence", 120.0, window_oracle);
  criterion(4, "Aggregation correctness", 5.0, aggregation);
  criterion(5, "Gradient check", 30.0, gradient_check);

  std::optional<DeskRuns> desk;
  const auto setup = Clock::now();
  desk.emplace();
  fmt::print("     desk windows for 2x10 sats, 13 stations, 7 days: {:.2f} s\n",
             std::chrono::duration<double>(Clock::now() - setup).count());
  criterion(6, "Desk-scale convergence", 600.0, [&] { return convergence(*desk); });
  criterion(7, "Scheduler speedup", 600.0, [&] { return scheduler(*desk); });
  criterion(8, "Ground-station monotonicity and plateau", 1200.0, [&] { return stations(*desk); });
  criterion(9, "Idle-time ordering", 600.0, [&] { return idle_order(*desk); });
  criterion(10, "Determinism", 600.0, [&] { return determinism(*desk); });
  criterion(11, "Sweep-shape fidelity", 1.0, [&] { return sweep_shape(cli); });

  fmt::print("{} of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
