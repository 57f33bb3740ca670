#pragma once

// Discrete-event simulation of one FL run over a constellation.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "satfl/contact.hpp"
#include "satfl/data.hpp"
#include "satfl/strategies.hpp"
#include "satfl/training.hpp"

namespace satfl {

double transfer_time(double bytes, double bandwidth_bps);
double compute_time(double epochs, double flops_per_epoch, double flops_rate);

struct DatasetSpec {
  enum class Kind { Synthetic, Femnist };
  Kind kind = Kind::Synthetic;
  std::string path;          // LEAF root for Femnist
  SyntheticParams synthetic;  // n_clients and seed are filled per run
  double holdout_fraction = 0.1;
  Clip clip;
};

struct SimConfig {
  ConstellationSpec constellation{2, 10, 500.0};
  int stations = 13;
  StrategyConfig strategy;
  HyperParams hp;
  std::chrono::sys_days start{std::chrono::year{2024} / 4 / 14};
  std::chrono::sys_days end{std::chrono::year{2024} / 7 / 13};
  int max_rounds = 500;
  std::uint64_t seed = 0;
  double flops_rate = 40e9;
  double flops_per_epoch = 98e6;
  double bandwidth_bps = 580e6;
  DatasetSpec dataset;
  bool client_eval = false;
  ScanParams scan;
  EarthModel earth;
  Exec exec = Exec::Parallel;

  double horizon_s() const;
  void validate() const;
};

enum class SatState { Idle = 0, Rx = 1, Tx = 2, Compute = 3 };
const char* to_string(SatState s);

struct TimelineSegment {
  SatelliteId sat;
  SatState state = SatState::Idle;
  double t0 = 0.0;
  double t1 = 0.0;
};

// Collects activity intervals and resolves overlaps by priority
// Tx > Rx > Compute > Idle into a gap-free partition.
class TimelineRecorder {
 public:
  explicit TimelineRecorder(std::vector<SatelliteId> sats);
  void paint(int sat, SatState state, double t0, double t1);
  std::vector<TimelineSegment> resolve(int sat, double t0, double t1) const;

 private:
  struct Mark {
    double t0, t1;
    SatState state;
  };
  std::vector<SatelliteId> sats_;
  std::vector<std::vector<Mark>> marks_;
};

enum class EventKind { TxComplete = 0, RxComplete = 1, ComputeDone = 2, RoundStart = 3 };
const char* to_string(EventKind k);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::RoundStart;
  int sat = -1;
  std::uint64_t seq = 0;
  int round = 0;

  auto key() const { return std::tuple(t, kind, sat, seq); }
};

// Pops in (t, kind, sat, insertion) order.
class EventQueue {
 public:
  void push(double t, EventKind kind, int sat, int round);
  Event pop();
  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return a.key() > b.key(); }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct RoundRecord {
  int round_idx = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double duration_s = 0.0;
  std::vector<SatelliteId> participants;
  std::vector<int> epochs;  // executed epochs per participant
  double accuracy = 0.0;
  double loss = 0.0;
  std::optional<double> client_accuracy;
};

struct StateTotals {
  double idle = 0.0, rx = 0.0, tx = 0.0, compute = 0.0;
  double elapsed() const { return idle + rx + tx + compute; }
};

struct MetricsLog {
  std::string variant;
  std::vector<RoundRecord> rounds;
  std::vector<SatelliteId> satellites;
  std::vector<std::vector<TimelineSegment>> segments;  // per satellite
  std::vector<StateTotals> totals;                     // per satellite
  double t0 = 0.0;
  double t_stop = 0.0;
  bool cannot_perform_fl = false;
  bool incomplete_round = false;  // the horizon ran out inside a round
  int discarded_stale = 0;

  double max_accuracy() const;
  double mean_round_duration_s() const;
  double mean_round_duration_h() const { return mean_round_duration_s() / 3600.0; }
  // Idle seconds per satellite per simulated hour.
  double idle_s_per_satellite_per_hour() const;
  double idle_fraction() const;
};

std::map<SatState, double> idle_breakdown(const MetricsLog& log, const SatelliteId& sat);

// Everything a run needs besides the config.
struct SimInputs {
  ContactTimeline timeline;
  ModelSpec model;
  std::vector<LocalDataset> clients;  // parallel to timeline.satellites()
  LocalDataset test;
};

// Constellation, windows (or `windows` restricted to the configured stations)
// and the partitioned dataset.
SimInputs prepare_inputs(const SimConfig& cfg, const ContactTimeline* windows = nullptr);

struct TrainingJob {
  int sat = 0;
  ModelParams start;
  int epochs = 0;
  bool proximal = false;
  std::uint64_t seed = 0;
  std::optional<ModelParams> result;
};

// Runs unresolved jobs; Parallel and Serial give identical results.
void resolve_jobs(std::span<TrainingJob> jobs, const Mlp& model,
                  std::span<const LocalDataset> clients, const HyperParams& hp, Exec exec);

class Simulation {
 public:
  Simulation(const SimConfig& cfg, const SimInputs& inputs, std::ostream* trace = nullptr);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Synchronous strategies: one full round. nullopt once the run is over.
  std::optional<RoundState> run_round();
  // Buffered strategy: runs to the next aggregation.
  std::optional<RoundState> run_until_aggregation();
  bool finished() const;
  const SimConfig& config() const;
  MetricsLog finish();

  const ModelParams& global_model() const;
  std::span<const ClientState> clients() const;
  const BufferState& buffer() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<RoundState> run_round_fedavg(Simulation& sim);
std::optional<RoundState> run_round_fedprox(Simulation& sim);
std::vector<RoundState> run_fedbuff(Simulation& sim);

MetricsLog run_simulation(const SimConfig& cfg, const SimInputs& inputs,
                          std::ostream* trace = nullptr);
MetricsLog run_simulation(const SimConfig& cfg);

}  // namespace satfl
