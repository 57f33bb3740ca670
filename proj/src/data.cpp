#include "satfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "satfl/errors.hpp"
#include "satfl/rng.hpp"

namespace satfl {

namespace fs = std::filesystem;

size_t PartitionPlan::count(size_t sat) const {
  size_t n = 0;
  for (const auto& r : shards.at(sat)) n += r.size();
  return n;
}

std::vector<WriterDataset> load_leaf_femnist(const std::string& path) {
  fs::path root(path);
  if (fs::is_directory(root / "all_data")) root /= "all_data";
  if (!fs::is_directory(root)) throw ParseError("FEMNIST path is not a directory: " + path);
  std::vector<fs::path> shards;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".json") shards.push_back(e.path());
  std::sort(shards.begin(), shards.end());
  if (shards.empty()) throw ParseError("no LEAF *.json shards under " + root.string());

  std::map<std::string, WriterDataset> writers;
  for (const auto& file : shards) {
    nlohmann::json doc;
    try {
      std::ifstream in(file);
      doc = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw ParseError(file.string() + ": " + e.what());
    }
    try {
      const auto& users = doc.at("users");
      const auto& user_data = doc.at("user_data");
      for (const auto& uid_json : users) {
        const auto uid = uid_json.get<std::string>();
        const auto& entry = user_data.at(uid);
        const auto& xs = entry.at("x");
        const auto& ys = entry.at("y");
        if (xs.size() != ys.size())
          throw ParseError(file.string() + ": writer " + uid + " has mismatched x/y counts");
        auto& w = writers[uid];
        w.writer_id = uid;
        for (size_t i = 0; i < xs.size(); ++i) {
          const auto row = xs[i].get<std::vector<float>>();
          if (w.samples.dim == 0) w.samples.dim = static_cast<int>(row.size());
          if (static_cast<int>(row.size()) != w.samples.dim || row.empty())
            throw ParseError(file.string() + ": writer " + uid + " has ragged feature rows");
          const int y = ys[i].get<int>();
          if (y < 0 || y >= kFemnistClasses)
            throw ParseError(file.string() + ": writer " + uid + " has unknown label " +
                             std::to_string(y));
          w.samples.features.insert(w.samples.features.end(), row.begin(), row.end());
          w.samples.labels.push_back(y);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(file.string() + ": " + e.what());
    }
  }

  std::vector<WriterDataset> out;
  for (auto& [id, w] : writers) {
    if (w.samples.empty()) continue;
    auto& f = w.samples.features;
    const float peak = *std::max_element(f.begin(), f.end());
    if (*std::min_element(f.begin(), f.end()) < 0.0f)
      throw ParseError("writer " + id + " has negative pixel values");
    if (peak > 1.0f)
      for (float& v : f) v /= 255.0f;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<WriterDataset> synthetic_noniid(const SyntheticParams& p) {
  if (p.n_clients < 1) throw std::invalid_argument("synthetic: n_clients must be >= 1");
  if (p.n_classes < 1 || p.dim < 1) throw std::invalid_argument("synthetic: bad shape");
  if (p.min_samples < 1 || p.min_samples > p.max_samples)
    throw std::invalid_argument("synthetic: need 1 <= min_samples <= max_samples");
  if (!(p.skew > 0.0)) throw std::invalid_argument("synthetic: skew must be positive");

  std::mt19937_64 rng(derive_seed(p.seed, {0x5e7}));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> means(static_cast<size_t>(p.n_classes) * p.dim);
  for (double& m : means) m = p.class_sep * unit(rng);

  std::vector<WriterDataset> out;
  out.reserve(static_cast<size_t>(p.n_clients));
  std::uniform_int_distribution<int> size_dist(p.min_samples, p.max_samples);
  std::gamma_distribution<double> gamma(p.skew, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int c = 0; c < p.n_clients; ++c) {
    WriterDataset w;
    w.writer_id = fmt::format("w{:05d}", c);
    w.samples.dim = p.dim;
    const int n = size_dist(rng);

    std::vector<double> mix(static_cast<size_t>(p.n_classes));
    double total = 0.0;
    for (double& v : mix) total += (v = gamma(rng));
    if (total <= 0.0) {
      // Every gamma draw underflowed (tiny skew): fall back to a one-hot mix.
      std::uniform_int_distribution<int> pick(0, p.n_classes - 1);
      mix[static_cast<size_t>(pick(rng))] = total = 1.0;
    }
    std::vector<double> cdf(mix.size());
    std::partial_sum(mix.begin(), mix.end(), cdf.begin());

    std::vector<double> shift(static_cast<size_t>(p.dim));
    for (double& s : shift) s = p.writer_shift * unit(rng);

    for (int i = 0; i < n; ++i) {
      const double r = u01(rng) * total;
      int y = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
      y = std::min(y, p.n_classes - 1);
      for (int d = 0; d < p.dim; ++d)
        w.samples.features.push_back(static_cast<float>(
            means[static_cast<size_t>(y) * p.dim + d] + shift[d] + p.noise * unit(rng)));
      w.samples.labels.push_back(y);
    }
    out.push_back(std::move(w));
  }
  return out;
}

PartitionPlan partition_to_satellites(std::span<const WriterDataset> writers,
                                      std::span<const SatelliteId> satellites, Clip clip,
                                      std::uint64_t seed) {
  if (clip.min > clip.max) throw std::invalid_argument("partition: clip.min > clip.max");
  const size_t K = satellites.size();
  std::vector<size_t> order(writers.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return writers[a].writer_id < writers[b].writer_id; });
  for (size_t i = 1; i < order.size(); ++i)
    if (writers[order[i]].writer_id == writers[order[i - 1]].writer_id)
      throw std::invalid_argument("partition: duplicate writer id " + writers[order[i]].writer_id);

  size_t available = 0;
  for (const auto& w : writers) available += w.samples.size();
  const size_t needed = K * clip.min;
  if (available < needed)
    throw std::invalid_argument(fmt::format(
        "insufficient data: {} satellites x {} samples need {}, have {} (shortfall {})", K,
        clip.min, needed, available, needed - available));

  std::mt19937_64 rng(derive_seed(seed, {0x9a27}));
  shuffle_in_place(std::span<size_t>(order), rng);

  PartitionPlan plan;
  plan.satellites.assign(satellites.begin(), satellites.end());
  plan.shards.resize(K);
  std::vector<size_t> counts(K, 0);
  size_t next = 0;
  bool progress = true;
  while (progress && next < order.size()) {
    progress = false;
    for (size_t k = 0; k < K && next < order.size(); ++k) {
      if (counts[k] >= clip.min) continue;
      const auto& w = writers[order[next++]];
      plan.shards[k].push_back({w.writer_id, 0, w.samples.size()});
      counts[k] += w.samples.size();
      progress = true;
    }
  }

  std::vector<SampleRange> pool;
  for (size_t k = 0; k < K; ++k) {
    while (counts[k] > clip.max) {
      auto& last = plan.shards[k].back();
      const size_t excess = std::min(counts[k] - clip.max, last.size());
      pool.push_back({last.writer_id, last.end - excess, last.end});
      last.end -= excess;
      counts[k] -= excess;
      if (last.size() == 0) plan.shards[k].pop_back();
    }
  }
  for (; next < order.size(); ++next) {
    const auto& w = writers[order[next]];
    if (!w.samples.empty()) pool.push_back({w.writer_id, 0, w.samples.size()});
  }

  size_t cursor = 0;
  for (size_t k = 0; k < K; ++k) {
    while (counts[k] < clip.min) {
      if (cursor >= pool.size()) {
        size_t shortfall = 0;
        for (size_t j = k; j < K; ++j)
          shortfall += clip.min > counts[j] ? clip.min - counts[j] : 0;
        throw std::invalid_argument(
            fmt::format("insufficient data after clipping: shortfall {} samples", shortfall));
      }
      auto& src = pool[cursor];
      const size_t take = std::min(clip.min - counts[k], src.size());
      plan.shards[k].push_back({src.writer_id, src.begin, src.begin + take});
      src.begin += take;
      counts[k] += take;
      if (src.size() == 0) ++cursor;
    }
  }
  return plan;
}

std::vector<LocalDataset> materialize(const PartitionPlan& plan,
                                      std::span<const WriterDataset> writers) {
  std::map<std::string, const WriterDataset*> by_id;
  for (const auto& w : writers) by_id[w.writer_id] = &w;
  std::vector<LocalDataset> out(plan.shards.size());
  for (size_t k = 0; k < plan.shards.size(); ++k) {
    for (const auto& r : plan.shards[k]) {
      auto it = by_id.find(r.writer_id);
      if (it == by_id.end()) throw std::invalid_argument("materialize: unknown writer " + r.writer_id);
      const auto& src = it->second->samples;
      if (r.end > src.size()) throw std::invalid_argument("materialize: range out of bounds");
      for (size_t i = r.begin; i < r.end; ++i) out[k].append(src, i);
    }
  }
  return out;
}

HoldoutSplit split_holdout(std::vector<WriterDataset> writers, double fraction, std::uint64_t seed) {
  if (writers.size() < 2) throw std::invalid_argument("holdout split needs at least two writers");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  std::sort(writers.begin(), writers.end(),
            [](const WriterDataset& a, const WriterDataset& b) { return a.writer_id < b.writer_id; });
  std::mt19937_64 rng(derive_seed(seed, {0x7e57}));
  shuffle_in_place(std::span<WriterDataset>(writers), rng);
  size_t n_test = static_cast<size_t>(std::llround(fraction * static_cast<double>(writers.size())));
  n_test = std::clamp<size_t>(n_test, 1, writers.size() - 1);

  HoldoutSplit split;
  for (size_t i = 0; i < writers.size(); ++i) {
    if (i < n_test) {
      split.test_writers.push_back(writers[i].writer_id);
      for (size_t j = 0; j < writers[i].samples.size(); ++j)
        split.test.append(writers[i].samples, j);
    } else {
      split.train.push_back(std::move(writers[i]));
    }
  }
  std::sort(split.test_writers.begin(), split.test_writers.end());
  return split;
}

}  // namespace satfl
