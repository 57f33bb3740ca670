#pragma once

// Local client training, weighted aggregation and evaluation.

#include <cstdint>
#include <span>
#include <vector>

#include "satfl/model.hpp"

namespace satfl {

// eta is the learning rate, mu_prox the proximal coefficient. buffer_size 0
// means min(C, K).
struct HyperParams {
  int C = 10;
  int B = 32;
  int E = 5;
  double eta = 0.05;
  double mu_prox = 0.1;
  int buffer_size = 0;
  int staleness_max = 2;
  int min_epochs = 3;
  // Upper bound on SGD epochs actually executed per proximal update; the
  // simulated timeline still counts every epoch that fits before contact.
  int max_local_epochs = 20;

  void validate() const;
};

// E epochs of minibatch SGD over per-epoch Fisher-Yates shuffles.
ModelParams client_update_fixed(const Model& model, const ModelParams& w, const LocalDataset& data,
                                const HyperParams& hp, std::uint64_t seed);

struct ProximalResult {
  ModelParams params;
  int epochs_done = 0;
};

// epoch_budget epochs of SGD on l(w) + mu_prox/2 * ||w - w_global||^2.
ProximalResult client_update_proximal(const Model& model, const ModelParams& w_global,
                                      const LocalDataset& data, const HyperParams& hp,
                                      int epoch_budget, std::uint64_t seed);

// grad = data_weight * grad l(w; batch) + mu_prox * (w - anchor).
double objective_gradient(const Model& model, std::span<const double> w,
                          std::span<const double> anchor, double mu_prox,
                          const LocalDataset& data, std::span<const size_t> batch,
                          std::span<double> grad, double data_weight = 1.0);

struct WeightedUpdate {
  const ModelParams* params = nullptr;
  std::size_t n = 0;
};

// sum_k n_k / m * w_k with m = sum_k n_k.
ModelParams aggregate_weighted(std::span<const WeightedUpdate> updates);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

Evaluation evaluate(const Mlp& model, const ModelParams& w, const LocalDataset& test);

}  // namespace satfl
