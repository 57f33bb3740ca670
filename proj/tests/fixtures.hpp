#pragma once

// Hand-built scenarios: one station, a 2-3-2 MLP, transfer = 1 s and one
// epoch = 1 s, so schedules can be worked out by hand.

#include <vector>

#include "satfl/sim.hpp"

namespace fixtures {

using namespace satfl;

inline ContactTimeline make_timeline(int spc, double horizon,
                                     const std::vector<std::vector<Interval>>& ground) {
  std::vector<SatelliteId> ids;
  const int K = static_cast<int>(ground.size());
  for (int k = 0; k < K; ++k) ids.push_back({k / spc, k % spc});
  ContactTimeline tl(ids, {"A"}, {0.0, horizon});
  for (int k = 0; k < K; ++k) tl.add_ground_windows(k, 0, ground[k]);
  return tl;
}

inline LocalDataset tiny_dataset(int n, int offset) {
  LocalDataset d;
  d.dim = 2;
  for (int i = 0; i < n; ++i) {
    const int label = (i + offset) % 2;
    const float x = label ? 1.0f : -1.0f;
    d.features.push_back(x + 0.1f * static_cast<float>(i % 3));
    d.features.push_back(0.5f * static_cast<float>((i + offset) % 4) - 0.75f);
    d.labels.push_back(label);
  }
  return d;
}

inline SimInputs tiny_inputs(ContactTimeline tl) {
  SimInputs in;
  in.model = ModelSpec{2, {3}, 2};
  const int K = tl.num_satellites();
  for (int k = 0; k < K; ++k) in.clients.push_back(tiny_dataset(8 + 2 * k, k));
  in.test = tiny_dataset(20, 7);
  in.timeline = std::move(tl);
  return in;
}

// 17 parameters * 4 bytes * 8 bits / 544 bps = 1 s per transfer.
inline SimConfig tiny_config(const std::string& variant) {
  SimConfig c;
  c.constellation = {1, 2, 500.0};
  c.stations = 1;
  c.strategy = StrategyConfig::from_variant(variant, 0);
  c.hp.C = 10;
  c.hp.B = 4;
  c.hp.E = 2;
  c.hp.max_local_epochs = 100;
  c.hp.min_epochs = 0;
  c.max_rounds = 1;
  c.bandwidth_bps = 544.0;
  c.flops_per_epoch = 1.0;
  c.flops_rate = 1.0;
  c.exec = Exec::Serial;
  return c;
}

}  // namespace fixtures
