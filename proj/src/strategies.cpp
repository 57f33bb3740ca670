#include "satfl/strategies.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace satfl {

void StrategyConfig::validate() const {
  if (min_epochs < 0) throw std::invalid_argument("min_epochs must be >= 0");
  if (algorithm == Algorithm::FedBuff && (schedule || schedule_v2 || intra_cc))
    throw std::invalid_argument("fedbuff supports no augmentation flags");
  if (schedule_v2 && (algorithm != Algorithm::FedProx || !schedule))
    throw std::invalid_argument("schedule_v2 requires fedprox with schedule");
  if (min_epochs > 0 && algorithm != Algorithm::FedProx)
    throw std::invalid_argument("min_epochs enforcement applies to fedprox only");
}

namespace {
const std::array<std::string, 8> kVariants{"fedavg",  "fedavg_sch",  "fedavg_intra",   "fedprox",
                                           "fedprox_sch", "fedprox_sch_v2", "fedprox_intra",
                                           "fedbuff"};
}

std::span<const std::string> variant_names() { return kVariants; }

std::string StrategyConfig::variant_name() const {
  switch (algorithm) {
    case Algorithm::FedBuff:
      return "fedbuff";
    case Algorithm::FedAvg:
      return intra_cc ? "fedavg_intra" : schedule ? "fedavg_sch" : "fedavg";
    case Algorithm::FedProx:
      if (intra_cc) return "fedprox_intra";
      if (schedule_v2) return "fedprox_sch_v2";
      return schedule ? "fedprox_sch" : "fedprox";
  }
  return "?";
}

StrategyConfig StrategyConfig::from_variant(const std::string& name, int min_epochs) {
  StrategyConfig s;
  if (name == "fedavg") {
  } else if (name == "fedavg_sch") {
    s.schedule = true;
  } else if (name == "fedavg_intra") {
    s.schedule = s.intra_cc = true;
  } else if (name == "fedprox") {
    s.algorithm = Algorithm::FedProx;
  } else if (name == "fedprox_sch") {
    s.algorithm = Algorithm::FedProx;
    s.schedule = true;
  } else if (name == "fedprox_sch_v2") {
    s.algorithm = Algorithm::FedProx;
    s.schedule = s.schedule_v2 = true;
    s = enforce_min_epochs(s, min_epochs);
  } else if (name == "fedprox_intra") {
    s.algorithm = Algorithm::FedProx;
    s.schedule = s.intra_cc = true;
  } else if (name == "fedbuff") {
    s.algorithm = Algorithm::FedBuff;
  } else {
    std::string list;
    for (const auto& v : kVariants) list += (list.empty() ? "" : ", ") + v;
    throw std::invalid_argument("unknown variant '" + name + "' (valid: " + list + ")");
  }
  return s;
}

StrategyConfig enforce_min_epochs(StrategyConfig policy, int min_epochs) {
  if (min_epochs < 0) throw std::invalid_argument("min_epochs must be >= 0");
  if (min_epochs > 0 && policy.algorithm != Algorithm::FedProx)
    throw std::invalid_argument("min_epochs enforcement wraps a proximal strategy");
  policy.min_epochs = min_epochs;
  return policy;
}

void ClientState::advance(Status next) {
  const auto expected = [&] {
    switch (status) {
      case Status::Idle: return Status::AwaitingModel;
      case Status::AwaitingModel: return Status::Training;
      case Status::Training: return Status::AwaitingReturn;
      case Status::AwaitingReturn: return Status::Idle;
    }
    return Status::Idle;
  }();
  if (next != expected)
    throw std::logic_error(std::string("illegal client transition ") + to_string(status) + " -> " +
                           to_string(next));
  status = next;
}

const char* to_string(ClientState::Status s) {
  switch (s) {
    case ClientState::Status::Idle: return "idle";
    case ClientState::Status::AwaitingModel: return "awaiting_model";
    case ClientState::Status::Training: return "training";
    case ClientState::Status::AwaitingReturn: return "awaiting_return";
  }
  return "?";
}

AccessPlanner::AccessPlanner(const ContactTimeline& timeline, double transfer_s, bool relays)
    : timeline_(&timeline), transfer_s_(transfer_s), relays_(relays) {
  if (!(transfer_s >= 0.0)) throw std::invalid_argument("transfer time must be >= 0");
  const int K = timeline.num_satellites();
  const auto& sats = timeline.satellites();
  cluster_members_.resize(K);
  ring_.resize(K);
  for (int k = 0; k < K; ++k) {
    if (!relays) {
      cluster_members_[k] = {k};
      continue;
    }
    for (int j = 0; j < K; ++j)
      if (sats[j].cluster == sats[k].cluster) cluster_members_[k].push_back(j);
  }
  if (relays)
    for (const auto& [pair, windows] : timeline.links()) {
      if (windows.empty()) continue;
      ring_[pair.first].push_back(pair.second);
      ring_[pair.second].push_back(pair.first);
    }
  for (auto& r : ring_) std::sort(r.begin(), r.end());
  longest_.assign(static_cast<size_t>(K), 0.0);
  for (int k = 0; k < K; ++k)
    for (const auto& w : timeline.ground_windows(k)) longest_[k] = std::max(longest_[k], w.duration());
}

double AccessPlanner::completion(const RelayPath& path) const {
  return path.t_s + (path.hop_count() + 1) * transfer_s_;
}

std::optional<RelayPath> AccessPlanner::route(int sat, double t, Direction dir) const {
  const auto& members = cluster_members_.at(static_cast<size_t>(sat));
  const int M = static_cast<int>(members.size());

  struct Cursor {
    std::span<const AccessWindow> list;
    size_t idx = 0;
    bool fresh_only = false;
  };
  std::vector<Cursor> cursors(M);
  const auto usable = [&](const Cursor& c, size_t i) {
    const auto& w = c.list[i];
    return c.fresh_only ? w.start_s >= t : w.end_s > t;
  };
  const auto tau_of = [&](const Cursor& c) { return std::max(c.list[c.idx].start_s, t); };

  using Item = std::tuple<double, int>;  // (tau, member position)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int m = 0; m < M; ++m) {
    auto& c = cursors[m];
    c.list = timeline_->ground_windows(members[m]);
    c.fresh_only = dir == Direction::Up && members[m] == sat;
    const double from = c.fresh_only ? t : t - longest_[members[m]];
    c.idx = static_cast<size_t>(
        std::lower_bound(c.list.begin(), c.list.end(), from,
                         [](const AccessWindow& w, double v) { return w.start_s < v; }) -
        c.list.begin());
    while (c.idx < c.list.size() && !usable(c, c.idx)) ++c.idx;
    if (c.idx < c.list.size()) heap.emplace(tau_of(c), m);
  }

  const auto hop_distances = [&](double tau) {
    std::vector<int> dist(static_cast<size_t>(timeline_->num_satellites()), -1);
    std::deque<int> queue{sat};
    dist[sat] = 0;
    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop_front();
      for (int b : ring_[a])
        if (dist[b] < 0 && timeline_->link_up(a, b, tau)) {
          dist[b] = dist[a] + 1;
          queue.push_back(b);
        }
    }
    return dist;
  };

  while (!heap.empty()) {
    const double tau = std::get<0>(heap.top());
    std::vector<int> group;
    while (!heap.empty() && std::get<0>(heap.top()) == tau) {
      group.push_back(std::get<1>(heap.top()));
      heap.pop();
    }
    const auto dist = M > 1 ? hop_distances(tau) : std::vector<int>{};
    std::optional<std::tuple<int, int, int, size_t>> best;  // (hops, member, station, pos)
    for (int m : group) {
      auto& c = cursors[m];
      // Several windows of one member can share this tau (in progress at t).
      for (size_t i = c.idx; i < c.list.size() && c.list[i].start_s <= tau; ++i) {
        if (!usable(c, i)) continue;
        const int member = members[m];
        const int hops = member == sat ? 0 : dist[member];
        if (hops < 0) continue;
        const double need = dir == Direction::Down ? transfer_s_ : (hops + 1) * transfer_s_;
        if (c.list[i].end_s < tau + need) continue;
        const auto key = std::make_tuple(hops, member, c.list[i].peer.index, i);
        if (!best || key < *best) best = key;
      }
    }
    if (best) {
      const auto [hops, member, station, pos] = *best;
      (void)pos;
      RelayPath path;
      path.t_s = tau;
      path.station = station;
      // Walk back from the member to the training satellite along decreasing distance.
      std::vector<int> rev{member};
      if (hops > 0) {
        const auto dist = hop_distances(tau);
        int cur = member;
        while (cur != sat) {
          int next = -1;
          for (int b : ring_[cur])
            if (dist[b] == dist[cur] - 1 && timeline_->link_up(cur, b, tau) &&
                (next < 0 || b < next))
              next = b;
          cur = next;
          rev.push_back(cur);
        }
      }
      path.hops.assign(rev.rbegin(), rev.rend());
      return path;
    }
    for (int m : group) {
      auto& c = cursors[m];
      while (c.idx < c.list.size() && (c.list[c.idx].start_s <= tau || !usable(c, c.idx))) ++c.idx;
      if (c.idx < c.list.size()) heap.emplace(tau_of(c), m);
    }
  }
  return std::nullopt;
}

std::optional<RelayPath> relay_route_intra_cluster(const ContactTimeline& timeline, int sat,
                                                   double t, Direction dir, double transfer_s) {
  return AccessPlanner(timeline, transfer_s, true).route(sat, t, dir);
}

std::optional<RoundTrip> planned_round_trip(const AccessPlanner& planner, int sat, double t,
                                            double training_s) {
  auto rx = planner.route(sat, t, Direction::Down);
  if (!rx) return std::nullopt;
  const double ready = planner.completion(*rx) + training_s;
  auto tx = planner.route(sat, ready, Direction::Up);
  if (!tx) return std::nullopt;
  return RoundTrip{rx->t_s, tx->t_s, (rx->t_s - t) + (tx->t_s - ready)};
}

namespace {

std::vector<int> take_smallest(std::vector<Selection> cands, int c) {
  std::sort(cands.begin(), cands.end(), [](const Selection& a, const Selection& b) {
    return a.key != b.key ? a.key < b.key : a.sat < b.sat;
  });
  std::vector<int> out;
  for (int i = 0; i < c && i < static_cast<int>(cands.size()); ++i) out.push_back(cands[i].sat);
  return out;
}

void check_c(int c) {
  if (c < 1) throw std::invalid_argument("selection size c must be >= 1");
}

}  // namespace

std::vector<int> select_clients_first_contact(const AccessPlanner& planner,
                                              std::span<const ClientState> clients, double t,
                                              int c) {
  check_c(c);
  std::vector<Selection> cands;
  for (int k = 0; k < static_cast<int>(clients.size()); ++k) {
    if (clients[k].status != ClientState::Status::Idle) continue;
    if (auto rx = planner.route(k, t, Direction::Down)) cands.push_back({k, rx->t_s});
  }
  return take_smallest(std::move(cands), c);
}

std::vector<int> select_clients_scheduled(const AccessPlanner& planner,
                                          std::span<const ClientState> clients, double t, int c,
                                          double training_s) {
  check_c(c);
  std::vector<Selection> cands;
  for (int k = 0; k < static_cast<int>(clients.size()); ++k) {
    if (clients[k].status != ClientState::Status::Idle) continue;
    if (auto rt = planned_round_trip(planner, k, t, training_s)) cands.push_back({k, rt->score_s});
  }
  return take_smallest(std::move(cands), c);
}

std::vector<int> select_evaluation_clients(const AccessPlanner& planner,
                                           std::span<const ClientState> clients, double t, int c,
                                           const StrategyConfig& strategy, double training_s) {
  return strategy.schedule ? select_clients_scheduled(planner, clients, t, c, training_s)
                           : select_clients_first_contact(planner, clients, t, c);
}

}  // namespace satfl
