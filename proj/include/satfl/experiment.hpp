#pragma once

// Config files, sweeps over constellation shapes and variants, and the
// CSV reports derived from run logs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "satfl/sim.hpp"

namespace satfl {

enum class Profile { Desk, Paper };
Profile parse_profile(std::string_view name);
const char* to_string(Profile p);

struct SweepCell {
  int clusters = 1;
  int sats_per_cluster = 1;
  int stations = 1;
  std::string variant;

  std::string key() const;  // e.g. fedavg_c2_s10_g13
  bool operator==(const SweepCell&) const = default;
};

struct SweepSpec {
  std::vector<int> clusters{1, 2};
  std::vector<int> sats_per_cluster{2, 10};
  std::vector<int> stations{1, 3, 13};
  std::vector<std::string> variants;  // default: every variant
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  // Variant-major, then clusters, sats_per_cluster, stations.
  std::vector<SweepCell> cells() const;
  size_t cell_count() const;
  void validate() const;
};

SweepSpec paper_sweep();
SweepSpec desk_sweep();

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<Profile> profile;
  std::optional<std::string> dataset;  // synthetic[:k=v,...] | femnist:<path>
};

struct ExperimentConfig {
  Profile profile = Profile::Desk;
  SimConfig run;
  SweepSpec sweep;
};

// Unknown keys, bad values and invalid variant combinations throw ConfigError.
ExperimentConfig parse_config_text(std::string_view text, const ConfigOverrides& overrides = {},
                                   const std::string& source = "<config>");
// An empty path means "all defaults".
ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

DatasetSpec parse_dataset(std::string_view spec);

// Every resolved setting, in a stable key order.
nlohmann::ordered_json resolved_settings(const SimConfig& cfg);
// "# key=value" lines for report headers.
std::vector<std::string> header_lines(const SimConfig& cfg);

// One finished (cell, seed) run.
struct RunRecord {
  SweepCell cell;
  std::uint64_t seed = 0;
  std::optional<MetricsLog> log;  // empty when the run failed
  std::string error;
};

SimConfig cell_config(const SimConfig& base, const SweepCell& cell, std::uint64_t seed);

// Windows are computed once per constellation shape; independent runs use up
// to `parallelism` threads. Failed runs are recorded and skipped.
std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg, int parallelism);

nlohmann::ordered_json run_to_json(const RunRecord& run);
RunRecord run_from_json(const nlohmann::json& doc);
void write_run_json(const RunRecord& run, const std::string& path);
RunRecord read_run_json(const std::string& path);

enum class Metric { MaxAccuracy, RoundDuration, IdleTime };
Metric parse_metric(std::string_view name);
const char* to_string(Metric m);
// max_accuracy; mean round duration in hours; idle seconds per satellite per hour.
double metric_value(const MetricsLog& log, Metric m);

struct HeatmapCell {
  std::string variant;
  int clusters = 0;
  int sats_per_cluster = 0;
  int stations = 0;
  double mean = 0.0;
  int n_seeds = 0;
  bool operator==(const HeatmapCell&) const = default;
};

struct HeatmapTable {
  std::string metric;
  std::vector<std::string> header;  // comment lines without the leading "# "
  std::vector<HeatmapCell> cells;
  bool operator==(const HeatmapTable&) const = default;
};

// Cell = mean over successful seeds. A single-satellite cell scores 0 accuracy.
HeatmapTable build_heatmap(const std::vector<RunRecord>& runs, Metric metric,
                           std::vector<std::string> header);
void write_heatmap_csv(const HeatmapTable& table, std::ostream& out);
HeatmapTable read_heatmap_csv(std::istream& in, const std::string& source = "<csv>");

// round,t_s,accuracy,round_duration_s
void write_line_csv(const MetricsLog& log, const std::vector<std::string>& header,
                    std::ostream& out);

// Heatmaps for all three metrics plus one line CSV per run under out_dir.
void emit_report(const std::vector<RunRecord>& runs, const std::vector<std::string>& header,
                 const std::string& out_dir);

std::string format_number(double v);

}  // namespace satfl
