#pragma once

// Flat-parameter models trained by the federated clients.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace satfl {

struct ModelParams {
  std::vector<double> values;

  ModelParams() = default;
  explicit ModelParams(std::vector<double> v) : values(std::move(v)) {}
  ModelParams(std::initializer_list<double> v) : values(v) {}
  explicit ModelParams(size_t dim, double fill = 0.0) : values(dim, fill) {}

  size_t dim() const { return values.size(); }
  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

// Row-major samples with integer class labels.
struct LocalDataset {
  int dim = 0;
  std::vector<float> features;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const float> row(size_t i) const {
    return {features.data() + i * static_cast<size_t>(dim), static_cast<size_t>(dim)};
  }
  void append(const LocalDataset& other, size_t i);
  void validate() const;
};

// Fully connected ReLU network with a softmax cross-entropy head.
struct ModelSpec {
  int input_dim = 784;
  std::vector<int> hidden{58};
  int num_classes = 62;

  // Throws std::invalid_argument for non-positive sizes or a missing head.
  void validate() const;
  size_t num_params() const;
  std::vector<int> layer_sizes() const;  // input, hidden..., classes

  static ModelSpec femnist_default() { return {}; }
};

// Serialized size with 32-bit parameters.
size_t model_size_bytes(const ModelSpec& spec);

class Model {
 public:
  virtual ~Model() = default;
  virtual size_t num_params() const = 0;

  // Mean loss over the batch; `grad` (num_params long) is overwritten with
  // the mean gradient.
  virtual double loss_and_gradient(std::span<const double> w, const LocalDataset& data,
                                   std::span<const size_t> batch, std::span<double> grad) const = 0;
  virtual double loss(std::span<const double> w, const LocalDataset& data,
                      std::span<const size_t> batch) const = 0;
};

class Mlp final : public Model {
 public:
  explicit Mlp(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  size_t num_params() const override { return num_params_; }

  double loss_and_gradient(std::span<const double> w, const LocalDataset& data,
                           std::span<const size_t> batch, std::span<double> grad) const override;
  double loss(std::span<const double> w, const LocalDataset& data,
              std::span<const size_t> batch) const override;

  // Class logits for one sample.
  void logits(std::span<const double> w, std::span<const float> x, std::span<double> out) const;
  int predict(std::span<const double> w, std::span<const float> x) const;

  // He-uniform weights, zero biases.
  ModelParams init_params(std::uint64_t seed) const;

 private:
  // Summed batch loss; accumulates the summed gradient into grad when non-empty.
  double batch_pass(std::span<const double> w, const LocalDataset& data,
                    std::span<const size_t> batch, std::span<double> grad) const;

  ModelSpec spec_;
  std::vector<int> sizes_;
  std::vector<size_t> offsets_;  // start of W_l; b_l follows it
  size_t num_params_ = 0;
};

// Least squares on the label value, no bias: 0.5 * mean((w.x - y)^2).
class LinearRegression final : public Model {
 public:
  explicit LinearRegression(int dim) : dim_(dim) {}
  size_t num_params() const override { return static_cast<size_t>(dim_); }
  double loss_and_gradient(std::span<const double> w, const LocalDataset& data,
                           std::span<const size_t> batch, std::span<double> grad) const override;
  double loss(std::span<const double> w, const LocalDataset& data,
              std::span<const size_t> batch) const override;

 private:
  int dim_;
};

}  // namespace satfl
