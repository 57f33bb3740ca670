// Serial vs OpenMP kernels: window scans and a batch of client updates.

#include <benchmark/benchmark.h>

#include "satfl/contact.hpp"
#include "satfl/ground_stations.hpp"
#include "satfl/rng.hpp"
#include "satfl/sim.hpp"

using namespace satfl;

namespace {

void BM_ContactTimeline(benchmark::State& state) {
  const auto exec = state.range(0) ? Exec::Parallel : Exec::Serial;
  const auto sats = build_constellation({2, 10, 500.0});
  const auto& stations = default_station_catalog();
  for (auto _ : state) {
    auto tl = build_contact_timeline(sats, stations, {0.0, 86400.0}, {}, {}, true, exec);
    benchmark::DoNotOptimize(tl.total_ground_windows());
  }
  state.SetLabel(exec == Exec::Parallel ? "parallel" : "serial");
}
BENCHMARK(BM_ContactTimeline)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

struct JobFixture {
  Mlp model{ModelSpec{64, {58}, 10}};
  std::vector<LocalDataset> clients;
  HyperParams hp;

  JobFixture() {
    SyntheticParams sp;
    sp.n_clients = 20;
    sp.seed = 3;
    for (auto& w : synthetic_noniid(sp)) clients.push_back(std::move(w.samples));
  }
};

void BM_ResolveJobs(benchmark::State& state) {
  static const JobFixture fx;
  const auto exec = state.range(0) ? Exec::Parallel : Exec::Serial;
  const auto start = fx.model.init_params(1);
  for (auto _ : state) {
    std::vector<TrainingJob> jobs;
    for (int k = 0; k < 20; ++k)
      jobs.push_back({k, start, fx.hp.E, false, derive_seed(7, {static_cast<std::uint64_t>(k)}),
                      std::nullopt});
    resolve_jobs(jobs, fx.model, fx.clients, fx.hp, exec);
    benchmark::DoNotOptimize(jobs.back().result);
  }
  state.SetLabel(exec == Exec::Parallel ? "parallel" : "serial");
}
BENCHMARK(BM_ResolveJobs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
