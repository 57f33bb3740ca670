// satfl: windows / run / sweep / report.
//
// Exit codes: 0 ok, 1 bad configuration or arguments, 2 runtime failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "satfl/errors.hpp"
#include "satfl/experiment.hpp"
#include "satfl/ground_stations.hpp"

namespace fs = std::filesystem;
using namespace satfl;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string profile;
  std::string windows_in;
  std::string dataset;
  std::string trace;
  std::string out_dir = "out";
};

void add_common(CLI::App* app, Common& o, bool trace) {
  app->add_option("--config", o.config, "JSON config file (defaults when omitted)");
  app->add_option("--seed", o.seed, "Override the run seed (sweep: a single seed)");
  app->add_option("--profile", o.profile, "desk | paper");
  app->add_option("--windows-in", o.windows_in, "Import access windows from CSV");
  app->add_option("--dataset", o.dataset, "synthetic[:k=v,...] | femnist:<path>");
  if (trace) app->add_option("--trace", o.trace, "Write a JSONL event trace here");
  app->add_option("--out-dir", o.out_dir, "Output directory");
}

ExperimentConfig load(const Common& o) {
  ConfigOverrides ov;
  ov.seed = o.seed;
  if (!o.profile.empty()) ov.profile = parse_profile(o.profile);
  if (!o.dataset.empty()) ov.dataset = o.dataset;
  return parse_config(o.config, ov);
}

void echo_header(const std::vector<std::string>& header) {
  for (const auto& h : header) std::cout << "# " << h << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

ContactTimeline imported_windows(const std::string& path, const SimConfig& cfg) {
  CsvImportOptions opt;
  opt.horizon = Horizon{0.0, cfg.horizon_s()};
  opt.sats_per_cluster = cfg.constellation.sats_per_cluster;
  return import_windows_csv(path, opt);
}

int cmd_windows(const Common& o) {
  const auto ec = load(o);
  const auto& cfg = ec.run;
  ContactTimeline tl;
  if (!o.windows_in.empty()) {
    tl = imported_windows(o.windows_in, cfg);
  } else {
    tl = build_contact_timeline(build_constellation(cfg.constellation),
                                station_subset(default_station_catalog(), cfg.stations),
                                {0.0, cfg.horizon_s()}, cfg.scan, cfg.earth, true, cfg.exec);
  }
  const auto path = fs::path(o.out_dir) / "windows.csv";
  auto out = open_out(path);
  write_windows_csv(tl, out);
  fmt::print("satellites={} stations={} ground_windows={} link_pairs={} -> {}\n",
              tl.num_satellites(), tl.stations().size(), tl.total_ground_windows(),
              tl.links().size(), path.string());
  return 0;
}

int cmd_run(const Common& o) {
  const auto ec = load(o);
  const auto& cfg = ec.run;
  const auto header = header_lines(cfg);
  echo_header(header);

  std::optional<ContactTimeline> windows;
  if (!o.windows_in.empty()) windows = imported_windows(o.windows_in, cfg);
  const auto inputs = prepare_inputs(cfg, windows ? &*windows : nullptr);

  std::ofstream trace;
  if (!o.trace.empty()) trace = open_out(o.trace);
  RunRecord rec;
  rec.cell = {cfg.constellation.n_clusters, cfg.constellation.sats_per_cluster, cfg.stations,
              cfg.strategy.variant_name()};
  rec.seed = cfg.seed;
  rec.log = run_simulation(cfg, inputs, o.trace.empty() ? nullptr : &trace);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_run_json(rec, (dir / "run.json").string());
  {
    auto out = open_out(dir / "line.csv");
    write_line_csv(*rec.log, header, out);
  }
  const auto& log = *rec.log;
  fmt::print("variant={} rounds={} max_accuracy={} mean_round_duration_h={} idle_fraction={}{}\n",
             log.variant, log.rounds.size(), format_number(log.max_accuracy()),
             format_number(log.mean_round_duration_h()), format_number(log.idle_fraction()),
             log.cannot_perform_fl ? " (single satellite: no FL)" : "");
  return 0;
}

int cmd_sweep(const Common& o, bool dry_run, int jobs) {
  const auto ec = load(o);
  const auto cells = ec.sweep.cells();
  if (dry_run) {
    for (const auto& c : cells) std::cout << c.key() << '\n';
    fmt::print("cells={} seeds={} runs={}\n", cells.size(), ec.sweep.seeds.size(),
               cells.size() * ec.sweep.seeds.size());
    return 0;
  }
  if (!o.windows_in.empty())
    throw ConfigError("--windows-in applies to single runs, not sweeps");

  const auto header = header_lines(ec.run);
  echo_header(header);
  const auto runs = run_sweep(ec, jobs);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir / "runs");
  {
    auto out = open_out(dir / "runs" / "header.txt");
    for (const auto& h : header) out << h << '\n';
  }
  int failed = 0;
  for (const auto& r : runs) {
    write_run_json(r, (dir / "runs" / fmt::format("{}_seed{}.json", r.cell.key(), r.seed)).string());
    if (!r.log) {
      ++failed;
      std::cerr << "failed: " << r.cell.key() << " seed " << r.seed << ": " << r.error << '\n';
    }
  }
  emit_report(runs, header, o.out_dir);
  fmt::print("runs={} failed={} -> {}\n", runs.size(), failed, dir.string());
  return failed == static_cast<int>(runs.size()) && failed > 0 ? 2 : 0;
}

int cmd_report(const std::string& runs_dir, const std::string& out_dir,
               const std::string& metric) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(runs_dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no run logs in " + runs_dir);

  std::vector<RunRecord> runs;
  for (const auto& f : files) runs.push_back(read_run_json(f.string()));
  std::vector<std::string> header;
  if (std::ifstream in(fs::path(runs_dir) / "header.txt"); in)
    for (std::string line; std::getline(in, line);) header.push_back(line);

  if (metric.empty()) {
    emit_report(runs, header, out_dir);
  } else {
    const auto m = parse_metric(metric);
    auto out = open_out(fs::path(out_dir) / (std::string("heatmap_") + to_string(m) + ".csv"));
    write_heatmap_csv(build_heatmap(runs, m, header), out);
  }
  fmt::print("runs={} -> {}\n", runs.size(), out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning over LEO satellite constellations"};
  app.require_subcommand(1);

  Common o;
  auto* windows = app.add_subcommand("windows", "Compute or import access windows, write CSV");
  add_common(windows, o, false);

  auto* run = app.add_subcommand("run", "Simulate one configuration");
  add_common(run, o, true);

  bool dry_run = false;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run every (cell, seed) of the sweep");
  add_common(sweep, o, false);
  sweep->add_flag("--dry-run", dry_run, "List the cells without running them");
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string runs_dir, metric;
  std::string report_out = "out";
  auto* report = app.add_subcommand("report", "Rebuild CSVs from saved run logs");
  report->add_option("--runs", runs_dir, "Directory of run JSON files")->required();
  report->add_option("--out-dir", report_out, "Output directory");
  report->add_option("--metric", metric, "max_accuracy | round_duration | idle_time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*windows) return cmd_windows(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o, dry_run, jobs);
    if (*report) return cmd_report(runs_dir, report_out, metric);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
