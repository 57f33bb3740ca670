#include "satfl/training.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "satfl/rng.hpp"

namespace satfl {

void HyperParams::validate() const {
  if (C < 1) throw std::invalid_argument("C must be >= 1");
  if (B < 1) throw std::invalid_argument("B must be >= 1");
  if (E < 1) throw std::invalid_argument("E must be >= 1");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
  if (!(mu_prox >= 0.0)) throw std::invalid_argument("mu_prox must be >= 0");
  if (buffer_size < 0) throw std::invalid_argument("buffer_size must be >= 0 (0 = min(C, K))");
  if (staleness_max < 0) throw std::invalid_argument("staleness_max must be >= 0");
  if (min_epochs < 0) throw std::invalid_argument("min_epochs must be >= 0");
  if (max_local_epochs < 1) throw std::invalid_argument("max_local_epochs must be >= 1");
}

double objective_gradient(const Model& model, std::span<const double> w,
                          std::span<const double> anchor, double mu_prox,
                          const LocalDataset& data, std::span<const size_t> batch,
                          std::span<double> grad, double data_weight) {
  double loss = model.loss_and_gradient(w, data, batch, grad);
  if (data_weight != 1.0)
    for (double& g : grad) g *= data_weight;
  if (mu_prox != 0.0) {
    double sq = 0.0;
    for (size_t i = 0; i < grad.size(); ++i) {
      const double d = w[i] - anchor[i];
      grad[i] += mu_prox * d;
      sq += d * d;
    }
    loss = data_weight * loss + 0.5 * mu_prox * sq;
  } else {
    loss *= data_weight;
  }
  return loss;
}

namespace {

// Shared SGD loop; anchor is only read when mu_prox != 0.
ModelParams run_sgd(const Model& model, const ModelParams& start, const ModelParams& anchor,
                    double mu_prox, const LocalDataset& data, const HyperParams& hp, int epochs,
                    std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("client update on an empty dataset");
  if (start.dim() != model.num_params())
    throw std::invalid_argument("parameter vector does not match the model");
  std::mt19937_64 rng(seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  ModelParams w = start;
  std::vector<double> grad(w.dim());
  const size_t B = static_cast<size_t>(hp.B);
  for (int e = 0; e < epochs; ++e) {
    shuffle_in_place(std::span<size_t>(order), rng);
    for (size_t lo = 0; lo < order.size(); lo += B) {
      const size_t hi = std::min(order.size(), lo + B);
      std::span<const size_t> batch(order.data() + lo, hi - lo);
      objective_gradient(model, w.values, anchor.values, mu_prox, data, batch, grad);
      for (size_t i = 0; i < grad.size(); ++i) w.values[i] -= hp.eta * grad[i];
    }
  }
  return w;
}

}  // namespace

ModelParams client_update_fixed(const Model& model, const ModelParams& w, const LocalDataset& data,
                                const HyperParams& hp, std::uint64_t seed) {
  return run_sgd(model, w, w, 0.0, data, hp, hp.E, seed);
}

ProximalResult client_update_proximal(const Model& model, const ModelParams& w_global,
                                      const LocalDataset& data, const HyperParams& hp,
                                      int epoch_budget, std::uint64_t seed) {
  if (epoch_budget < 1) throw std::invalid_argument("epoch_budget must be >= 1");
  return {run_sgd(model, w_global, w_global, hp.mu_prox, data, hp, epoch_budget, seed),
          epoch_budget};
}

ModelParams aggregate_weighted(std::span<const WeightedUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("aggregate_weighted: no updates");
  const size_t dim = updates.front().params->dim();
  double m = 0.0;
  for (const auto& u : updates) {
    if (u.params->dim() != dim) throw std::invalid_argument("aggregate_weighted: dim mismatch");
    if (u.n == 0) throw std::invalid_argument("aggregate_weighted: zero sample count");
    m += static_cast<double>(u.n);
  }
  ModelParams out(dim);
  for (const auto& u : updates) {
    const double c = static_cast<double>(u.n) / m;
    for (size_t i = 0; i < dim; ++i) out.values[i] += c * u.params->values[i];
  }
  return out;
}

Evaluation evaluate(const Mlp& model, const ModelParams& w, const LocalDataset& test) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
  const size_t C = static_cast<size_t>(model.spec().num_classes);
  std::vector<double> z(C);
  size_t correct = 0;
  double loss = 0.0;
  for (size_t i = 0; i < test.size(); ++i) {
    model.logits(w.values, test.row(i), z);
    size_t best = 0;
    for (size_t c = 1; c < C; ++c)
      if (z[c] > z[best]) best = c;
    if (static_cast<int>(best) == test.labels[i]) ++correct;
    double zmax = z[best], denom = 0.0;
    for (double v : z) denom += std::exp(v - zmax);
    loss += -(z[static_cast<size_t>(test.labels[i])] - zmax - std::log(denom));
  }
  const double n = static_cast<double>(test.size());
  return {static_cast<double>(correct) / n, loss / n};
}

}  // namespace satfl
