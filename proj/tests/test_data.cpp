#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>
#include <unistd.h>

#include "satfl/data.hpp"
#include "satfl/errors.hpp"

using namespace satfl;
namespace fs = std::filesystem;

namespace {

std::vector<SatelliteId> sats(int n) {
  std::vector<SatelliteId> v;
  for (int i = 0; i < n; ++i) v.push_back({0, i});
  return v;
}

WriterDataset writer(const std::string& id, int n) {
  WriterDataset w;
  w.writer_id = id;
  w.samples.dim = 1;
  for (int i = 0; i < n; ++i) {
    w.samples.features.push_back(static_cast<float>(i));
    w.samples.labels.push_back(i % 3);
  }
  return w;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("satfl_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("partition_to_satellites clip and disjointness") {
  SyntheticParams sp;
  sp.n_clients = 40;
  sp.min_samples = 50;
  sp.max_samples = 600;
  sp.seed = 3;
  const auto writers = synthetic_noniid(sp);
  const auto ids = sats(20);
  const Clip clip{200, 350};
  auto plan = partition_to_satellites(writers, ids, clip, 9);
  REQUIRE(plan.shards.size() == 20);

  std::map<std::string, std::vector<std::pair<size_t, size_t>>> used;
  for (size_t k = 0; k < ids.size(); ++k) {
    CHECK(plan.count(k) >= clip.min);
    CHECK(plan.count(k) <= clip.max);
    for (const auto& r : plan.shards[k]) {
      CHECK(r.size() > 0);
      used[r.writer_id].push_back({r.begin, r.end});
    }
  }
  for (auto& [id, ranges] : used) {
    std::sort(ranges.begin(), ranges.end());
    for (size_t i = 1; i < ranges.size(); ++i) CHECK(ranges[i].first >= ranges[i - 1].second);
  }

  auto local = materialize(plan, writers);
  for (size_t k = 0; k < ids.size(); ++k) CHECK(local[k].size() == plan.count(k));
}

TEST_CASE("partition is deterministic and ignores input order") {
  std::vector<WriterDataset> ws;
  for (int i = 0; i < 30; ++i) ws.push_back(writer(fmt::format("w{:03d}", i), 120 + 13 * i));
  auto ids = sats(10);
  const auto a = partition_to_satellites(ws, ids, {}, 4);
  std::mt19937_64 rng(1);
  std::shuffle(ws.begin(), ws.end(), rng);
  CHECK(partition_to_satellites(ws, ids, {}, 4) == a);
  CHECK_FALSE(partition_to_satellites(ws, ids, {}, 5) == a);
}

TEST_CASE("partition edge cases") {
  SUBCASE("exact supply") {
    std::vector<WriterDataset> ws{writer("a", 200), writer("b", 200)};
    auto plan = partition_to_satellites(ws, sats(2), {}, 0);
    CHECK(plan.count(0) == 200);
    CHECK(plan.count(1) == 200);
  }
  SUBCASE("shortfall is reported") {
    std::vector<WriterDataset> ws{writer("a", 300), writer("b", 50)};
    try {
      partition_to_satellites(ws, sats(2), {}, 0);
      FAIL("expected insufficient data");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("shortfall 50") != std::string::npos);
    }
  }
  SUBCASE("duplicate writer ids") {
    std::vector<WriterDataset> ws{writer("a", 300), writer("a", 300)};
    CHECK_THROWS_AS(partition_to_satellites(ws, sats(1), {}, 0), std::invalid_argument);
  }
  SUBCASE("large writers are split") {
    std::vector<WriterDataset> ws{writer("big", 1000)};
    auto plan = partition_to_satellites(ws, sats(3), {}, 0);
    for (size_t k = 0; k < 3; ++k) {
      CHECK(plan.count(k) >= 200);
      CHECK(plan.count(k) <= 350);
    }
  }
  CHECK_THROWS(partition_to_satellites({}, sats(1), {300, 200}, 0));
}

TEST_CASE("synthetic_noniid shape and skew") {
  SyntheticParams sp;
  sp.n_clients = 200;
  sp.seed = 7;
  const auto ws = synthetic_noniid(sp);
  REQUIRE(ws.size() == 200);
  CHECK(ws[0].writer_id == "w00000");
  double mean_top_share = 0;
  for (const auto& w : ws) {
    CHECK(w.samples.size() >= 200);
    CHECK(w.samples.size() <= 350);
    CHECK(w.samples.dim == 64);
    std::vector<int> hist(10, 0);
    for (int y : w.samples.labels) ++hist.at(static_cast<size_t>(y));
    mean_top_share += *std::max_element(hist.begin(), hist.end()) / double(w.samples.size());
  }
  mean_top_share /= ws.size();
  // Dirichlet(0.5) over 10 classes: the largest share averages ~0.38, far
  // above the IID value of 0.1 + sampling noise.
  CHECK(mean_top_share > 0.28);
  CHECK(mean_top_share < 0.5);

  SyntheticParams iid = sp;
  iid.skew = 1000.0;
  double iid_top = 0;
  for (const auto& w : synthetic_noniid(iid)) {
    std::vector<int> hist(10, 0);
    for (int y : w.samples.labels) ++hist.at(static_cast<size_t>(y));
    iid_top += *std::max_element(hist.begin(), hist.end()) / double(w.samples.size());
  }
  CHECK(iid_top / 200 < 0.2);

  CHECK(synthetic_noniid(sp)[5].samples.features == ws[5].samples.features);
  sp.skew = 0;
  CHECK_THROWS(synthetic_noniid(sp));
}

TEST_CASE("split_holdout") {
  SyntheticParams sp;
  sp.n_clients = 25;
  auto ws = synthetic_noniid(sp);
  auto split = split_holdout(ws, 0.1, 1);
  CHECK(split.test_writers.size() == 3);  // round(2.5) away from zero
  CHECK(split.train.size() == 22);
  std::set<std::string> train_ids;
  for (const auto& w : split.train) train_ids.insert(w.writer_id);
  for (const auto& id : split.test_writers) CHECK(train_ids.count(id) == 0);
  CHECK(split_holdout(std::vector<WriterDataset>(ws.begin(), ws.begin() + 2), 0.1, 0).train.size() == 1);
  CHECK_THROWS(split_holdout(ws, 0.0, 1));
}

TEST_CASE("load_leaf_femnist") {
  TempDir dir("leaf");
  fs::create_directories(dir.path / "all_data");
  {
    std::ofstream f(dir.path / "all_data" / "all_data_0.json");
    f << R"({"users":["f0001","f0002"],"num_samples":[2,1],
             "user_data":{"f0001":{"x":[[0,255,128],[10,0,0]],"y":[3,61]},
                          "f0002":{"x":[[1,2,3]],"y":[0]}}})";
  }
  auto ws = load_leaf_femnist(dir.path.string());
  REQUIRE(ws.size() == 2);
  CHECK(ws[0].writer_id == "f0001");
  CHECK(ws[0].samples.size() == 2);
  CHECK(ws[0].samples.features[1] == doctest::Approx(1.0f));
  CHECK(ws[0].samples.labels[1] == 61);

  {
    std::ofstream f(dir.path / "all_data" / "all_data_1.json");
    f << R"({"users":["f9"],"user_data":{"f9":{"x":[[0,0,0]],"y":[62]}}})";
  }
  try {
    load_leaf_femnist(dir.path.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("all_data_1.json") != std::string::npos);
  }
  CHECK_THROWS_AS(load_leaf_femnist((dir.path / "missing").string()), ParseError);
}
