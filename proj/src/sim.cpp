#include "satfl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "satfl/ground_stations.hpp"
#include "satfl/rng.hpp"

namespace satfl {

double transfer_time(double bytes, double bandwidth_bps) {
  if (bytes < 0.0 || !(bandwidth_bps > 0.0))
    throw std::invalid_argument("transfer_time: need bytes >= 0 and bandwidth > 0");
  return 8.0 * bytes / bandwidth_bps;
}

double compute_time(double epochs, double flops_per_epoch, double flops_rate) {
  if (epochs < 0.0 || flops_per_epoch < 0.0 || !(flops_rate > 0.0))
    throw std::invalid_argument("compute_time: need epochs, flops >= 0 and rate > 0");
  return epochs * flops_per_epoch / flops_rate;
}

double SimConfig::horizon_s() const {
  return std::chrono::duration<double>(end - start).count();
}

void SimConfig::validate() const {
  constellation.validate();
  if (!is_valid_station_count(stations))
    throw std::invalid_argument(
        fmt::format("stations={} is not in the catalog subsets {{1,2,3,5,10,13}}", stations));
  strategy.validate();
  hp.validate();
  if (!(start < end)) throw std::invalid_argument("start date must precede end date");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!(flops_rate > 0.0) || !(flops_per_epoch > 0.0) || !(bandwidth_bps > 0.0))
    throw std::invalid_argument("flops_rate, flops_per_epoch and bandwidth_bps must be > 0");
  if (!(dataset.holdout_fraction > 0.0 && dataset.holdout_fraction < 1.0))
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  if (dataset.kind == DatasetSpec::Kind::Femnist && dataset.path.empty())
    throw std::invalid_argument("femnist dataset needs a path");
}

const char* to_string(SatState s) {
  switch (s) {
    case SatState::Idle: return "idle";
    case SatState::Rx: return "rx";
    case SatState::Tx: return "tx";
    case SatState::Compute: return "compute";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::TxComplete: return "tx_complete";
    case EventKind::RxComplete: return "rx_complete";
    case EventKind::ComputeDone: return "compute_done";
    case EventKind::RoundStart: return "round_start";
  }
  return "?";
}

// --- timeline recorder -------------------------------------------------------

TimelineRecorder::TimelineRecorder(std::vector<SatelliteId> sats)
    : sats_(std::move(sats)), marks_(sats_.size()) {}

void TimelineRecorder::paint(int sat, SatState state, double t0, double t1) {
  if (t1 < t0) throw std::invalid_argument("paint: t1 < t0");
  if (state == SatState::Idle || t1 == t0) return;
  marks_.at(static_cast<size_t>(sat)).push_back({t0, t1, state});
}

namespace {
int priority(SatState s) {
  switch (s) {
    case SatState::Tx: return 3;
    case SatState::Rx: return 2;
    case SatState::Compute: return 1;
    case SatState::Idle: return 0;
  }
  return 0;
}
constexpr SatState kByPriority[] = {SatState::Idle, SatState::Compute, SatState::Rx, SatState::Tx};
}  // namespace

std::vector<TimelineSegment> TimelineRecorder::resolve(int sat, double t0, double t1) const {
  struct Edge {
    double t;
    int prio;
    int delta;
  };
  std::vector<Edge> edges;
  for (const auto& m : marks_.at(static_cast<size_t>(sat))) {
    const double a = std::max(m.t0, t0), b = std::min(m.t1, t1);
    if (b <= a) continue;
    edges.push_back({a, priority(m.state), +1});
    edges.push_back({b, priority(m.state), -1});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.t < y.t; });

  std::vector<TimelineSegment> out;
  const auto emit = [&](SatState s, double a, double b) {
    if (b <= a) return;
    if (!out.empty() && out.back().state == s && out.back().t1 == a)
      out.back().t1 = b;
    else
      out.push_back({sats_[static_cast<size_t>(sat)], s, a, b});
  };
  int count[4] = {0, 0, 0, 0};
  double cursor = t0;
  for (size_t i = 0; i < edges.size();) {
    const double t = edges[i].t;
    int top = 0;
    for (int p = 3; p > 0; --p)
      if (count[p] > 0) {
        top = p;
        break;
      }
    emit(kByPriority[top], cursor, t);
    cursor = t;
    for (; i < edges.size() && edges[i].t == t; ++i) count[edges[i].prio] += edges[i].delta;
  }
  emit(SatState::Idle, cursor, t1);
  return out;
}

// --- event queue ---------------------------------------------------------------

void EventQueue::push(double t, EventKind kind, int sat, int round) {
  heap_.push(Event{t, kind, sat, next_seq_++, round});
}

Event EventQueue::pop() {
  if (heap_.empty()) throw std::logic_error("pop from an empty event queue");
  Event e = heap_.top();
  heap_.pop();
  return e;
}

// --- metrics ---------------------------------------------------------------------

double MetricsLog::max_accuracy() const {
  double best = 0.0;
  for (const auto& r : rounds) best = std::max(best, r.accuracy);
  return best;
}

double MetricsLog::mean_round_duration_s() const {
  if (rounds.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rounds) sum += r.duration_s;
  return sum / static_cast<double>(rounds.size());
}

double MetricsLog::idle_s_per_satellite_per_hour() const {
  const double hours = (t_stop - t0) / 3600.0;
  if (totals.empty() || hours <= 0.0) return 0.0;
  double idle = 0.0;
  for (const auto& s : totals) idle += s.idle;
  return idle / static_cast<double>(totals.size()) / hours;
}

double MetricsLog::idle_fraction() const { return idle_s_per_satellite_per_hour() / 3600.0; }

std::map<SatState, double> idle_breakdown(const MetricsLog& log, const SatelliteId& sat) {
  auto it = std::find(log.satellites.begin(), log.satellites.end(), sat);
  if (it == log.satellites.end())
    throw std::out_of_range("idle_breakdown: unknown satellite " + sat.str());
  const auto& t = log.totals[static_cast<size_t>(it - log.satellites.begin())];
  return {{SatState::Idle, t.idle},
          {SatState::Rx, t.rx},
          {SatState::Tx, t.tx},
          {SatState::Compute, t.compute}};
}

// --- inputs -----------------------------------------------------------------------

SimInputs prepare_inputs(const SimConfig& cfg, const ContactTimeline* windows) {
  cfg.validate();
  const auto members = build_constellation(cfg.constellation);
  const int K = static_cast<int>(members.size());
  SimInputs in;
  if (windows) {
    in.timeline = windows->with_first_stations(cfg.stations);
    if (in.timeline.num_satellites() != K)
      throw std::invalid_argument(fmt::format(
          "window set has {} satellites, constellation has {}", in.timeline.num_satellites(), K));
  } else {
    const auto stations = station_subset(default_station_catalog(), cfg.stations);
    in.timeline = build_contact_timeline(members, stations, {0.0, cfg.horizon_s()}, cfg.scan,
                                         cfg.earth, cfg.strategy.intra_cc, cfg.exec);
  }

  std::vector<WriterDataset> writers;
  if (cfg.dataset.kind == DatasetSpec::Kind::Femnist) {
    writers = load_leaf_femnist(cfg.dataset.path);
    in.model = ModelSpec::femnist_default();
    if (!writers.empty()) in.model.input_dim = writers.front().samples.dim;
  } else {
    auto sp = cfg.dataset.synthetic;
    sp.n_clients = static_cast<int>(std::ceil(1.1 * K)) + 2;
    sp.seed = derive_seed(cfg.seed, {0xda7a});
    writers = synthetic_noniid(sp);
    in.model = ModelSpec{sp.dim, {58}, sp.n_classes};
  }
  auto split = split_holdout(std::move(writers), cfg.dataset.holdout_fraction, cfg.seed);
  std::vector<SatelliteId> ids;
  for (const auto& m : members) ids.push_back(m.id);
  const auto plan = partition_to_satellites(split.train, ids, cfg.dataset.clip, cfg.seed);
  in.clients = materialize(plan, split.train);
  in.test = std::move(split.test);
  return in;
}

void resolve_jobs(std::span<TrainingJob> jobs, const Mlp& model,
                  std::span<const LocalDataset> clients, const HyperParams& hp, Exec exec) {
  std::vector<TrainingJob*> todo;
  for (auto& j : jobs)
    if (!j.result) todo.push_back(&j);
  const auto run = [&](TrainingJob& j) {
    const auto& data = clients[static_cast<size_t>(j.sat)];
    if (j.epochs == 0) {
      j.result = j.start;
    } else if (j.proximal) {
      j.result = client_update_proximal(model, j.start, data, hp, j.epochs, j.seed).params;
    } else {
      HyperParams fixed = hp;
      fixed.E = j.epochs;
      j.result = client_update_fixed(model, j.start, data, fixed, j.seed);
    }
  };
  const long n = static_cast<long>(todo.size());
  if (exec == Exec::Parallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) run(*todo[static_cast<size_t>(i)]);
  } else {
    for (long i = 0; i < n; ++i) run(*todo[static_cast<size_t>(i)]);
  }
}

// --- simulation ---------------------------------------------------------------------

struct Simulation::Impl {
  const SimConfig& cfg;
  const SimInputs& in;
  std::ostream* trace;
  Mlp model;
  int K;
  double horizon;
  double tt;   // one model transfer
  double ept;  // one epoch of compute
  AccessPlanner planner;
  std::vector<ClientState> clients;
  ModelParams global;
  int version = 0;
  EventQueue queue;
  TimelineRecorder recorder;
  MetricsLog log;
  std::vector<TrainingJob> jobs;
  std::vector<int> job_of;
  std::vector<int> jobs_started;
  std::vector<int> job_epochs;
  int rounds_done = 0;
  double last_agg = 0.0;
  bool over = false;
  bool started = false;
  RoundState round;
  BufferState buffer;

  Impl(const SimConfig& c, const SimInputs& i, std::ostream* tr)
      : cfg(c),
        in(i),
        trace(tr),
        model(i.model),
        K(i.timeline.num_satellites()),
        horizon(i.timeline.horizon().t1_s),
        tt(transfer_time(static_cast<double>(model_size_bytes(i.model)), c.bandwidth_bps)),
        ept(compute_time(1, c.flops_per_epoch, c.flops_rate)),
        planner(i.timeline, tt, c.strategy.intra_cc),
        clients(static_cast<size_t>(K)),
        global(model.init_params(derive_seed(c.seed, {0x1a17}))),
        recorder(i.timeline.satellites()),
        job_of(static_cast<size_t>(K), -1),
        jobs_started(static_cast<size_t>(K), 0),
        job_epochs(static_cast<size_t>(K), 0) {
    cfg.validate();
    if (static_cast<int>(in.clients.size()) != K)
      throw std::invalid_argument("one client dataset per satellite is required");
    log.variant = cfg.strategy.variant_name();
    log.satellites = in.timeline.satellites();
    log.t0 = in.timeline.horizon().t0_s;
    const int D = cfg.hp.buffer_size > 0 ? cfg.hp.buffer_size : std::min(cfg.hp.C, K);
    buffer.D = std::max(1, D);
    if (K < 2) {
      log.cannot_perform_fl = true;
      over = true;
    }
  }

  int c() const { return std::min(cfg.hp.C, K); }

  void note(double t, const char* kind, int sat, int r) {
    if (!trace) return;
    *trace << fmt::format(R"({{"t_s":{:.6f},"event":"{}","sat":{},"round":{}}})", t, kind,
                          sat >= 0 ? "\"" + in.timeline.satellites()[sat].str() + "\"" : "null", r)
           << '\n';
  }

  void paint_route(const RelayPath& p, Direction dir) {
    const int h = p.hop_count();
    if (dir == Direction::Down) {
      recorder.paint(p.hops[h], SatState::Rx, p.t_s, p.t_s + tt);
      for (int j = h, step = 1; j >= 1; --j, ++step) {
        const double a = p.t_s + step * tt;
        recorder.paint(p.hops[j], SatState::Tx, a, a + tt);
        recorder.paint(p.hops[j - 1], SatState::Rx, a, a + tt);
      }
    } else {
      for (int j = 0; j < h; ++j) {
        const double a = p.t_s + j * tt;
        recorder.paint(p.hops[j], SatState::Tx, a, a + tt);
        recorder.paint(p.hops[j + 1], SatState::Rx, a, a + tt);
      }
      recorder.paint(p.hops[h], SatState::Tx, p.t_s + h * tt, p.t_s + (h + 1) * tt);
    }
  }

  void start_job(int k, int epochs, bool proximal) {
    TrainingJob j;
    j.sat = k;
    j.start = global;
    j.epochs = epochs;
    j.proximal = proximal;
    j.seed = derive_seed(cfg.seed, {0x70b, static_cast<std::uint64_t>(k),
                                    static_cast<std::uint64_t>(jobs_started[k]++)});
    job_of[k] = static_cast<int>(jobs.size());
    job_epochs[k] = epochs;
    jobs.push_back(std::move(j));
  }

  ModelParams take_result(int k) {
    resolve_jobs(jobs, model, in.clients, cfg.hp, cfg.exec);
    ModelParams out = std::move(*jobs.at(static_cast<size_t>(job_of[k])).result);
    job_of[k] = -1;
    if (std::all_of(job_of.begin(), job_of.end(), [](int j) { return j < 0; })) jobs.clear();
    return out;
  }

  // Whole epochs that fit in [a, b).
  int epochs_between(double a, double b) const {
    const double n = std::floor((b - a) / ept + 1e-9);
    return static_cast<int>(std::max(0.0, std::min(n, 1e9)));
  }

  void record_aggregation(double t, std::vector<SatelliteId> who, std::vector<int> epochs) {
    RoundRecord r;
    r.round_idx = rounds_done;
    r.t_start = last_agg;
    r.t_end = t;
    r.duration_s = t - last_agg;
    r.participants = std::move(who);
    r.epochs = std::move(epochs);
    const auto ev = evaluate(model, global, in.test);
    r.accuracy = ev.accuracy;
    r.loss = ev.loss;
    if (cfg.client_eval) {
      const double training = cfg.strategy.algorithm == Algorithm::FedAvg ? cfg.hp.E * ept : 0.0;
      const auto evals = select_evaluation_clients(planner, clients, t, c(), cfg.strategy, training);
      double correct = 0.0, total = 0.0;
      for (int k : evals) {
        const auto& d = in.clients[static_cast<size_t>(k)];
        correct += evaluate(model, global, d).accuracy * static_cast<double>(d.size());
        total += static_cast<double>(d.size());
      }
      if (total > 0) r.client_accuracy = correct / total;
    }
    note(t, "aggregate", -1, rounds_done);
    log.rounds.push_back(std::move(r));
    ++rounds_done;
    ++version;
    last_agg = t;
  }

  void abandon() {
    log.incomplete_round = true;
    over = true;
  }

  // --- synchronous (FedAvg / FedProx) ---

  std::optional<RoundState> run_round() {
    if (over) return std::nullopt;
    if (cfg.strategy.algorithm == Algorithm::FedBuff)
      throw std::logic_error("run_round drives synchronous strategies only");
    if (rounds_done >= cfg.max_rounds) {
      over = true;
      return std::nullopt;
    }
    const bool prox = cfg.strategy.algorithm == Algorithm::FedProx;
    const double t = last_agg;
    const double training = prox ? cfg.strategy.min_epochs * ept : cfg.hp.E * ept;
    auto selected = cfg.strategy.schedule
                        ? select_clients_scheduled(planner, clients, t, c(), training)
                        : select_clients_first_contact(planner, clients, t, c());
    if (selected.empty()) {
      over = true;
      return std::nullopt;
    }
    round = RoundState{rounds_done, selected, {}, t, t, false};
    note(t, to_string(EventKind::RoundStart), -1, rounds_done);
    for (int k : selected) {
      clients[k].advance(ClientState::Status::AwaitingModel);
      clients[k].current_round = rounds_done;
      auto rx = planner.route(k, t, Direction::Down);
      if (!rx) {
        abandon();
        return std::nullopt;
      }
      paint_route(*rx, Direction::Down);
      queue.push(planner.completion(*rx), EventKind::RxComplete, k, rounds_done);
    }

    while (!queue.empty()) {
      const Event e = queue.pop();
      const int k = e.sat;
      note(e.t, to_string(e.kind), k, e.round);
      switch (e.kind) {
        case EventKind::RxComplete: {
          clients[k].advance(ClientState::Status::Training);
          if (!prox) {
            start_job(k, cfg.hp.E, false);
            const double done = e.t + cfg.hp.E * ept;
            recorder.paint(k, SatState::Compute, e.t, done);
            queue.push(done, EventKind::ComputeDone, k, e.round);
            break;
          }
          auto tx = planner.route(k, e.t + cfg.strategy.min_epochs * ept, Direction::Up);
          if (!tx) {
            recorder.paint(k, SatState::Compute, e.t, horizon);
            abandon();
            return std::nullopt;
          }
          const int logical = epochs_between(e.t, tx->t_s);
          start_job(k, std::min(logical, cfg.hp.max_local_epochs), true);
          recorder.paint(k, SatState::Compute, e.t, tx->t_s);
          paint_route(*tx, Direction::Up);
          clients[k].advance(ClientState::Status::AwaitingReturn);
          queue.push(planner.completion(*tx), EventKind::TxComplete, k, e.round);
          break;
        }
        case EventKind::ComputeDone: {
          clients[k].advance(ClientState::Status::AwaitingReturn);
          auto tx = planner.route(k, e.t, Direction::Up);
          if (!tx) {
            abandon();
            return std::nullopt;
          }
          paint_route(*tx, Direction::Up);
          queue.push(planner.completion(*tx), EventKind::TxComplete, k, e.round);
          break;
        }
        case EventKind::TxComplete: {
          clients[k].advance(ClientState::Status::Idle);
          round.received.emplace(k, take_result(k));
          if (round.received.size() < round.selected.size()) break;
          std::vector<WeightedUpdate> ups;
          std::vector<SatelliteId> who;
          std::vector<int> epochs;
          for (int s : round.selected) {
            ups.push_back({&round.received.at(s), in.clients[static_cast<size_t>(s)].size()});
            who.push_back(in.timeline.satellites()[s]);
            epochs.push_back(job_epochs[s]);
          }
          global = aggregate_weighted(ups);
          record_aggregation(e.t, std::move(who), std::move(epochs));
          round.t_round_end = e.t;
          round.complete = true;
          return round;
        }
        case EventKind::RoundStart:
          break;
      }
    }
    abandon();
    return std::nullopt;
  }

  // --- buffered (FedBuff) ---

  void fedbuff_receive(int k, double t) {
    auto rx = planner.route(k, t, Direction::Down);
    if (!rx) return;  // no contact left: the satellite stays idle
    clients[k].advance(ClientState::Status::AwaitingModel);
    paint_route(*rx, Direction::Down);
    queue.push(planner.completion(*rx), EventKind::RxComplete, k, rounds_done);
  }

  std::optional<RoundState> run_until_aggregation() {
    if (over) return std::nullopt;
    if (cfg.strategy.algorithm != Algorithm::FedBuff)
      throw std::logic_error("run_until_aggregation drives the buffered strategy only");
    if (!started) {
      started = true;
      for (int k = 0; k < K; ++k) fedbuff_receive(k, 0.0);
    }
    if (rounds_done >= cfg.max_rounds) {
      over = true;
      return std::nullopt;
    }
    while (!queue.empty()) {
      const Event e = queue.pop();
      const int k = e.sat;
      note(e.t, to_string(e.kind), k, e.round);
      if (e.kind == EventKind::RxComplete) {
        clients[k].advance(ClientState::Status::Training);
        clients[k].staleness_origin = version;
        auto tx = planner.route(k, e.t, Direction::Up);
        if (!tx) {
          recorder.paint(k, SatState::Compute, e.t, horizon);
          continue;
        }
        start_job(k, std::min(epochs_between(e.t, tx->t_s), cfg.hp.max_local_epochs), true);
        recorder.paint(k, SatState::Compute, e.t, tx->t_s);
        paint_route(*tx, Direction::Up);
        clients[k].advance(ClientState::Status::AwaitingReturn);
        queue.push(planner.completion(*tx), EventKind::TxComplete, k, e.round);
        continue;
      }
      if (e.kind != EventKind::TxComplete) continue;

      clients[k].advance(ClientState::Status::Idle);
      auto params = take_result(k);
      const int staleness = version - clients[k].staleness_origin;
      if (staleness > cfg.hp.staleness_max) {
        ++log.discarded_stale;
        note(e.t, "discard_stale", k, e.round);
      } else {
        buffer.contents.push_back(
            {k, std::move(params), in.clients[static_cast<size_t>(k)].size(), staleness});
      }
      std::optional<RoundState> agg;
      if (buffer.full()) {
        std::vector<WeightedUpdate> ups;
        RoundState rs;
        rs.round_idx = rounds_done;
        rs.t_round_start = last_agg;
        rs.t_round_end = e.t;
        rs.complete = true;
        std::vector<SatelliteId> who;
        std::vector<int> epochs;
        for (const auto& b : buffer.contents) {
          ups.push_back({&b.params, b.n});
          rs.selected.push_back(b.sat);
          who.push_back(in.timeline.satellites()[b.sat]);
          epochs.push_back(job_epochs[b.sat]);
        }
        global = aggregate_weighted(ups);
        for (auto& b : buffer.contents) rs.received.emplace(b.sat, std::move(b.params));
        buffer.contents.clear();
        record_aggregation(e.t, std::move(who), std::move(epochs));
        agg = std::move(rs);
      }
      if (rounds_done >= cfg.max_rounds) {
        over = true;
        return agg;
      }
      fedbuff_receive(k, e.t);
      if (agg) return agg;
    }
    over = true;
    return std::nullopt;
  }

  MetricsLog finish() {
    over = true;
    log.t_stop = rounds_done >= cfg.max_rounds ? last_agg : horizon;
    log.segments.clear();
    log.totals.assign(static_cast<size_t>(K), {});
    for (int k = 0; k < K; ++k) {
      auto segs = recorder.resolve(k, log.t0, log.t_stop);
      auto& tot = log.totals[static_cast<size_t>(k)];
      for (const auto& s : segs) {
        const double d = s.t1 - s.t0;
        switch (s.state) {
          case SatState::Idle: tot.idle += d; break;
          case SatState::Rx: tot.rx += d; break;
          case SatState::Tx: tot.tx += d; break;
          case SatState::Compute: tot.compute += d; break;
        }
      }
      log.segments.push_back(std::move(segs));
    }
    return log;
  }
};

Simulation::Simulation(const SimConfig& cfg, const SimInputs& inputs, std::ostream* trace)
    : impl_(std::make_unique<Impl>(cfg, inputs, trace)) {}
Simulation::~Simulation() = default;

std::optional<RoundState> Simulation::run_round() { return impl_->run_round(); }
std::optional<RoundState> Simulation::run_until_aggregation() {
  return impl_->run_until_aggregation();
}
bool Simulation::finished() const { return impl_->over; }
const SimConfig& Simulation::config() const { return impl_->cfg; }
MetricsLog Simulation::finish() { return impl_->finish(); }
const ModelParams& Simulation::global_model() const { return impl_->global; }
std::span<const ClientState> Simulation::clients() const { return impl_->clients; }
const BufferState& Simulation::buffer() const { return impl_->buffer; }

std::optional<RoundState> run_round_fedavg(Simulation& sim) {
  if (sim.config().strategy.algorithm != Algorithm::FedAvg)
    throw std::logic_error("run_round_fedavg on a non-FedAvg simulation");
  return sim.run_round();
}

std::optional<RoundState> run_round_fedprox(Simulation& sim) {
  if (sim.config().strategy.algorithm != Algorithm::FedProx)
    throw std::logic_error("run_round_fedprox on a non-FedProx simulation");
  return sim.run_round();
}

std::vector<RoundState> run_fedbuff(Simulation& sim) {
  std::vector<RoundState> out;
  while (auto r = sim.run_until_aggregation()) out.push_back(std::move(*r));
  return out;
}

MetricsLog run_simulation(const SimConfig& cfg, const SimInputs& inputs, std::ostream* trace) {
  Simulation sim(cfg, inputs, trace);
  if (cfg.strategy.algorithm == Algorithm::FedBuff)
    while (sim.run_until_aggregation()) {
    }
  else
    while (sim.run_round()) {
    }
  return sim.finish();
}

MetricsLog run_simulation(const SimConfig& cfg) {
  const auto inputs = prepare_inputs(cfg);
  return run_simulation(cfg, inputs);
}

}  // namespace satfl
