#pragma once

// Client datasets: LEAF FEMNIST ingestion, a synthetic non-IID generator,
// held-out test split and the writer -> satellite partition.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "satfl/model.hpp"
#include "satfl/orbital.hpp"

namespace satfl {

struct WriterDataset {
  std::string writer_id;
  LocalDataset samples;
};

inline constexpr int kFemnistClasses = 62;

// Reads every *.json shard under `path` (or `path`/all_data). Pixel values
// above 1 are rescaled from [0,255]. Throws ParseError naming the bad file.
std::vector<WriterDataset> load_leaf_femnist(const std::string& path);

struct SyntheticParams {
  int n_clients = 10;
  int n_classes = 10;
  int dim = 64;
  int min_samples = 200;
  int max_samples = 350;
  double skew = 0.5;          // Dirichlet concentration of per-client label mix
  double class_sep = 0.45;    // std-dev of the class means
  double noise = 1.0;         // within-class std-dev
  double writer_shift = 0.1;  // std-dev of a per-client feature offset
  std::uint64_t seed = 0;
};

// Gaussian class clusters with Dirichlet(skew) label proportions per client.
std::vector<WriterDataset> synthetic_noniid(const SyntheticParams& params);

struct Clip {
  size_t min = 200;
  size_t max = 350;
};

struct SampleRange {
  std::string writer_id;
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool operator==(const SampleRange&) const = default;
};

struct PartitionPlan {
  std::vector<SatelliteId> satellites;
  std::vector<std::vector<SampleRange>> shards;  // parallel to satellites

  size_t count(size_t sat) const;
  bool operator==(const PartitionPlan&) const = default;
};

// Writers are sorted by id, shuffled with `seed`, then dealt round-robin to
// satellites still below clip.min. Shards above clip.max are truncated and
// the excess (plus unused writers) tops up any shard still short.
// Throws std::invalid_argument stating the shortfall when data runs out.
PartitionPlan partition_to_satellites(std::span<const WriterDataset> writers,
                                      std::span<const SatelliteId> satellites, Clip clip,
                                      std::uint64_t seed);

std::vector<LocalDataset> materialize(const PartitionPlan& plan,
                                      std::span<const WriterDataset> writers);

struct HoldoutSplit {
  std::vector<WriterDataset> train;
  std::vector<std::string> test_writers;
  LocalDataset test;
};

// Reserves round(fraction * writers) writers (at least one) as a global test set.
HoldoutSplit split_holdout(std::vector<WriterDataset> writers, double fraction, std::uint64_t seed);

}  // namespace satfl
