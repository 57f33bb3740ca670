#pragma once

// Client selection, contact planning with optional intra-cluster relays,
// and the per-client / per-round / buffer state of the FL strategies.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satfl/contact.hpp"
#include "satfl/model.hpp"

namespace satfl {

enum class Algorithm { FedAvg, FedProx, FedBuff };

struct StrategyConfig {
  Algorithm algorithm = Algorithm::FedAvg;
  bool schedule = false;
  bool schedule_v2 = false;
  bool intra_cc = false;
  // Proximal clients skip return contacts until this many epochs are done. 0 = off.
  int min_epochs = 0;

  // fedbuff accepts no augmentation; schedule_v2 needs fedprox + schedule.
  void validate() const;
  // fedavg, fedavg_sch, fedavg_intra, fedprox, fedprox_sch, fedprox_sch_v2,
  // fedprox_intra, fedbuff.
  std::string variant_name() const;
  static StrategyConfig from_variant(const std::string& name, int min_epochs = 3);
  bool operator==(const StrategyConfig&) const = default;
};

std::span<const std::string> variant_names();

StrategyConfig enforce_min_epochs(StrategyConfig policy, int min_epochs);

struct ClientState {
  enum class Status { Idle, AwaitingModel, Training, AwaitingReturn };
  Status status = Status::Idle;
  int current_round = -1;
  int staleness_origin = 0;

  // Idle -> AwaitingModel -> Training -> AwaitingReturn -> Idle; throws
  // std::logic_error on anything else.
  void advance(Status next);
};

const char* to_string(ClientState::Status s);

struct RoundState {
  int round_idx = 0;
  std::vector<int> selected;                // S_t, satellite indices
  std::map<int, ModelParams> received;      // returned client models
  double t_round_start = 0.0;
  double t_round_end = 0.0;
  bool complete = false;
};

struct BufferEntry {
  int sat = 0;
  ModelParams params;
  size_t n = 0;
  int staleness = 0;
};

struct BufferState {
  int D = 1;
  std::vector<BufferEntry> contents;

  bool full() const { return static_cast<int>(contents.size()) >= D; }
};

enum class Direction { Up, Down };  // Up: satellite -> ground

struct RelayPath {
  std::vector<int> hops;  // training satellite first, ground-contact member last
  double t_s = 0.0;       // when the first transfer of the chain starts
  int station = 0;
  int hop_count() const { return static_cast<int>(hops.size()) - 1; }
};

// One satellite-ground model transfer, possibly forwarded along the ring.
// Transfers take transfer_s each and must fit inside the ground window.
// Down: the satellite may use a window already in progress at t.
// Up: the satellite's own window must start at or after t (a fresh contact);
// relay members may use windows in progress.
class AccessPlanner {
 public:
  AccessPlanner(const ContactTimeline& timeline, double transfer_s, bool relays);

  std::optional<RelayPath> route(int sat, double t, Direction dir) const;
  // Time the model arrives at the satellite (Down) or at the station (Up).
  double completion(const RelayPath& path) const;

  const ContactTimeline& timeline() const { return *timeline_; }
  double transfer_s() const { return transfer_s_; }
  bool relays() const { return relays_; }

 private:
  const ContactTimeline* timeline_;
  double transfer_s_;
  bool relays_;
  std::vector<std::vector<int>> cluster_members_;  // by satellite index
  std::vector<std::vector<int>> ring_;              // link neighbours
  std::vector<double> longest_;                     // longest ground window per satellite
};

// Shortest ring path from `sat` to a cluster member in ground contact at t,
// or at the earliest later time one exists. The satellite itself wins ties.
std::optional<RelayPath> relay_route_intra_cluster(const ContactTimeline& timeline, int sat,
                                                   double t, Direction dir,
                                                   double transfer_s = 0.0);

struct Selection {
  int sat = 0;
  double key = 0.0;  // first-contact time or round-trip score
};

// The c idle satellites with the earliest next model receipt; ties to the lower id.
std::vector<int> select_clients_first_contact(const AccessPlanner& planner,
                                              std::span<const ClientState> clients, double t,
                                              int c);

// The c idle satellites with the smallest round-trip score (wait for the
// model plus wait for the return contact after `training_s`).
std::vector<int> select_clients_scheduled(const AccessPlanner& planner,
                                          std::span<const ClientState> clients, double t, int c,
                                          double training_s);

// Same protocol as training selection.
std::vector<int> select_evaluation_clients(const AccessPlanner& planner,
                                           std::span<const ClientState> clients, double t, int c,
                                           const StrategyConfig& strategy, double training_s);

// Round-trip score through the planner. training_s runs from model arrival,
// so without relays this equals round_trip_score(training_s + transfer_s).
std::optional<RoundTrip> planned_round_trip(const AccessPlanner& planner, int sat, double t,
                                            double training_s);

}  // namespace satfl
