#include "satfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace satfl {

bool ModelParams::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void LocalDataset::append(const LocalDataset& other, size_t i) {
  if (dim == 0) dim = other.dim;
  if (dim != other.dim) throw std::invalid_argument("LocalDataset::append: dimension mismatch");
  auto r = other.row(i);
  features.insert(features.end(), r.begin(), r.end());
  labels.push_back(other.labels[i]);
}

void LocalDataset::validate() const {
  if (dim <= 0 && !labels.empty()) throw std::invalid_argument("dataset dimension must be positive");
  if (features.size() != labels.size() * static_cast<size_t>(dim))
    throw std::invalid_argument("dataset feature/label count mismatch");
}

void ModelSpec::validate() const {
  if (input_dim <= 0) throw std::invalid_argument("model input dimension must be positive");
  if (num_classes <= 0) throw std::invalid_argument("model needs at least one output class");
  for (int h : hidden)
    if (h <= 0) throw std::invalid_argument("hidden layer sizes must be positive");
}

std::vector<int> ModelSpec::layer_sizes() const {
  std::vector<int> s{input_dim};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(num_classes);
  return s;
}

size_t ModelSpec::num_params() const {
  validate();
  const auto s = layer_sizes();
  size_t n = 0;
  for (size_t l = 0; l + 1 < s.size(); ++l)
    n += static_cast<size_t>(s[l]) * s[l + 1] + static_cast<size_t>(s[l + 1]);
  return n;
}

size_t model_size_bytes(const ModelSpec& spec) { return spec.num_params() * sizeof(float); }

Mlp::Mlp(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  sizes_ = spec_.layer_sizes();
  size_t off = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  num_params_ = off;
}

ModelParams Mlp::init_params(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  ModelParams p(num_params_);
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const size_t in = sizes_[l], out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (size_t i = 0; i < in * out; ++i) p.values[offsets_[l] + i] = u(rng);
  }
  return p;
}

namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

double Mlp::batch_pass(std::span<const double> w, const LocalDataset& data,
                       std::span<const size_t> batch, std::span<double> grad) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  const size_t L = sizes_.size() - 1;
  std::vector<Eigen::MatrixXd> acts(L + 1);
  acts[0].resize(B, sizes_[0]);
  for (Eigen::Index r = 0; r < B; ++r) {
    const auto x = data.row(batch[static_cast<size_t>(r)]);
    for (int i = 0; i < sizes_[0]; ++i) acts[0](r, i) = x[static_cast<size_t>(i)];
  }
  for (size_t l = 0; l < L; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> W(w.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::RowVectorXd> b(w.data() + offsets_[l] + static_cast<size_t>(in) * out, out);
    acts[l + 1].noalias() = acts[l] * W.transpose();
    acts[l + 1].rowwise() += b;
    if (l + 1 < L) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }

  // Softmax cross-entropy on the last layer.
  Eigen::MatrixXd& z = acts[L];
  Eigen::MatrixXd delta(z.rows(), z.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < B; ++r) {
    const double zmax = z.row(r).maxCoeff();
    delta.row(r) = (z.row(r).array() - zmax).exp().matrix();
    const double denom = delta.row(r).sum();
    const int label = data.labels[batch[static_cast<size_t>(r)]];
    total -= z(r, label) - zmax - std::log(denom);
    delta.row(r) /= denom;
    delta(r, label) -= 1.0;
  }
  if (grad.empty()) return total;

  for (size_t l = L; l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const RowMat> W(w.data() + offsets_[l], out, in);
    Eigen::Map<RowMat> gW(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::RowVectorXd> gb(grad.data() + offsets_[l] + static_cast<size_t>(in) * out, out);
    gW.noalias() += delta.transpose() * acts[l];
    gb += delta.colwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd next = delta * W;
    delta = next.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
  }
  return total;
}

double Mlp::loss_and_gradient(std::span<const double> w, const LocalDataset& data,
                              std::span<const size_t> batch, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double total = batch_pass(w, data, batch, grad);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
  return total * inv;
}

double Mlp::loss(std::span<const double> w, const LocalDataset& data,
                 std::span<const size_t> batch) const {
  return batch_pass(w, data, batch, {}) / static_cast<double>(batch.size());
}

void Mlp::logits(std::span<const double> w, std::span<const float> x, std::span<double> out) const {
  std::vector<double> cur(x.begin(), x.end()), next;
  const size_t L = sizes_.size() - 1;
  for (size_t l = 0; l < L; ++l) {
    const size_t in = sizes_[l], outn = sizes_[l + 1];
    const double* W = w.data() + offsets_[l];
    const double* b = W + in * outn;
    next.assign(outn, 0.0);
    for (size_t o = 0; o < outn; ++o) {
      double z = b[o];
      for (size_t i = 0; i < in; ++i) z += W[o * in + i] * cur[i];
      next[o] = (l + 1 < L) ? std::max(z, 0.0) : z;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

int Mlp::predict(std::span<const double> w, std::span<const float> x) const {
  std::vector<double> z(static_cast<size_t>(spec_.num_classes));
  logits(w, x, z);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double LinearRegression::loss_and_gradient(std::span<const double> w, const LocalDataset& data,
                                           std::span<const size_t> batch,
                                           std::span<double> grad) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (size_t idx : batch) {
    auto x = data.row(idx);
    double r = -static_cast<double>(data.labels[idx]);
    for (int i = 0; i < dim_; ++i) r += w[i] * x[i];
    total += 0.5 * r * r;
    for (int i = 0; i < dim_; ++i) grad[i] += r * x[i];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
  return total * inv;
}

double LinearRegression::loss(std::span<const double> w, const LocalDataset& data,
                              std::span<const size_t> batch) const {
  std::vector<double> g(num_params());
  return loss_and_gradient(w, data, batch, g);
}

}  // namespace satfl
