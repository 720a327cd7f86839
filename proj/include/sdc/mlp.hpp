#pragma once

// Dependency-free multilayer perceptron: inner-product layers, ReLU
// activations, a two-way one-hot output (component 0 = correct,
// component 1 = incorrect), softmax cross-entropy and momentum SGD.

#include "sdc/rng.hpp"
#include "sdc/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdc {

enum class LayerKind { InnerProduct, Relu };

struct LayerSpec {
  LayerKind kind = LayerKind::InnerProduct;
  Index in_dim = 0;
  Index out_dim = 0;

  bool operator==(const LayerSpec&) const = default;
};

/// Throws std::invalid_argument unless the chain is non-empty, dimensions
/// line up, every ReLU is square and the last layer is IP[2].
void validate_layers(const std::vector<LayerSpec>& layers);

template <typename Scalar>
struct InnerProduct {
  Matrix<Scalar> weights;  // out_dim x in_dim
  Vector<Scalar> bias;     // out_dim
};

/// Per-IP-layer parameter gradients, same shapes as the parameters.
template <typename Scalar>
using Gradients = std::vector<InnerProduct<Scalar>>;

/// y = W x + b.
template <typename DerivedW, typename DerivedB, typename DerivedX>
auto inner_product(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedB>& b,
                   const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedW::Scalar;
  if (w.cols() != x.rows() || w.rows() != b.rows() || b.cols() != 1 || x.cols() != 1)
    throw std::invalid_argument("inner_product: dimension mismatch");
  Vector<Scalar> y = w * x + b;
  return y;
}

/// Elementwise max(0, x).
template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> y = x.cwiseMax(Scalar(0));
  return y;
}

template <typename Scalar>
class Mlp {
 public:
  Mlp() = default;

  explicit Mlp(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    validate_layers(layers_);
    for (const auto& layer : layers_) {
      if (layer.kind != LayerKind::InnerProduct) continue;
      params_.push_back({Matrix<Scalar>::Zero(layer.out_dim, layer.in_dim), Vector<Scalar>::Zero(layer.out_dim)});
    }
  }

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<InnerProduct<Scalar>>& params() const { return params_; }
  std::vector<InnerProduct<Scalar>>& params() { return params_; }

  Index input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim; }
  Index output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim; }

  template <typename To>
  Mlp<To> cast() const {
    Mlp<To> out(layers_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out.params()[i].weights = params_[i].weights.template cast<To>();
      out.params()[i].bias = params_[i].bias.template cast<To>();
    }
    return out;
  }

  /// Columns of `inputs` are samples; returns 2 x batch raw scores.
  Matrix<Scalar> forward_batch(const Matrix<Scalar>& inputs) const {
    if (inputs.rows() != input_dim()) throw std::invalid_argument("forward: wrong feature length");
    Matrix<Scalar> a = inputs;
    std::size_t ip = 0;
    for (const auto& layer : layers_) {
      if (layer.kind == LayerKind::InnerProduct) {
        const auto& p = params_[ip++];
        a = (p.weights * a).colwise() + p.bias;
      } else {
        a = a.cwiseMax(Scalar(0));
      }
    }
    return a;
  }

  Vector<Scalar> forward(const Vector<Scalar>& x) const {
    if (x.size() != input_dim()) throw std::invalid_argument("forward: wrong feature length");
    Vector<Scalar> a = x;
    std::size_t ip = 0;
    for (const auto& layer : layers_) {
      if (layer.kind == LayerKind::InnerProduct) {
        const auto& p = params_[ip++];
        a = inner_product(p.weights, p.bias, a);
      } else {
        a = a.cwiseMax(Scalar(0));
      }
    }
    return a;
  }

  Index multiply_accumulates() const {
    Index macs = 0;
    for (const auto& l : layers_)
      if (l.kind == LayerKind::InnerProduct) macs += l.in_dim * l.out_dim;
    return macs;
  }

  Index relu_units() const {
    Index units = 0;
    for (const auto& l : layers_)
      if (l.kind == LayerKind::Relu) units += l.out_dim;
    return units;
  }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& p : params_) n += p.weights.size() + p.bias.size();
    return n;
  }

 private:
  std::vector<LayerSpec> layers_;
  std::vector<InnerProduct<Scalar>> params_;
};

/// Uniform(-1, 1) * sqrt(2 / fan_in) weights, zero biases.
template <typename Scalar>
void initialize_weights(Mlp<Scalar>& net, Rng& rng) {
  for (auto& p : net.params()) {
    const double scale = std::sqrt(2.0 / static_cast<double>(p.weights.cols()));
    for (Index c = 0; c < p.weights.cols(); ++c)
      for (Index r = 0; r < p.weights.rows(); ++r)
        p.weights(r, c) = static_cast<Scalar>(rng.uniform(-1.0, 1.0) * scale);
    p.bias.setZero();
  }
}

/// Argmax of the two scores; an exact tie (or NaN) resolves to Incorrect.
template <typename Derived>
Label classify_logits(const Eigen::MatrixBase<Derived>& logits) {
  if (logits.size() != 2) throw std::invalid_argument("classify: logits must have 2 components");
  return logits(0) > logits(1) ? Label::Correct : Label::Incorrect;
}

/// -log softmax(logits)[label], max-subtracted.
template <typename Derived>
double loss(const Eigen::MatrixBase<Derived>& logits, Label label) {
  const double l0 = static_cast<double>(logits(0));
  const double l1 = static_cast<double>(logits(1));
  const double own = label == Label::Correct ? l0 : l1;
  const double m = std::max(l0, l1);
  return (m - own) + std::log1p(std::exp(-std::abs(l0 - l1)));
}

template <typename Scalar>
struct LossAndGradients {
  double loss = 0.0;  // batch mean
  Gradients<Scalar> grads;
};

/// Mean softmax cross-entropy over the batch and its gradient with respect to
/// every weight and bias. Columns of `inputs` are (already standardized)
/// samples. The ReLU subgradient at 0 is 0.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const Mlp<Scalar>& net, const Matrix<Scalar>& inputs,
                                            std::span<const Label> labels) {
  const Index batch = inputs.cols();
  if (batch == 0) throw std::invalid_argument("gradients: empty batch");
  if (static_cast<std::size_t>(batch) != labels.size())
    throw std::invalid_argument("gradients: label count mismatch");
  if (inputs.rows() != net.input_dim()) throw std::invalid_argument("gradients: wrong feature length");

  const auto& layers = net.layers();
  std::vector<Matrix<Scalar>> acts;  // acts[i] is the input to layer i
  acts.reserve(layers.size() + 1);
  acts.push_back(inputs);
  {
    std::size_t ip = 0;
    for (const auto& layer : layers) {
      const auto& a = acts.back();
      if (layer.kind == LayerKind::InnerProduct) {
        const auto& p = net.params()[ip++];
        acts.push_back((p.weights * a).colwise() + p.bias);
      } else {
        acts.push_back(a.cwiseMax(Scalar(0)));
      }
    }
  }

  const Matrix<Scalar>& logits = acts.back();
  Matrix<Scalar> delta(2, batch);
  double total = 0.0;
  for (Index j = 0; j < batch; ++j) {
    const auto col = logits.col(j);
    total += loss(col, labels[static_cast<std::size_t>(j)]);
    const Scalar m = col.maxCoeff();
    const Scalar e0 = std::exp(col(0) - m);
    const Scalar e1 = std::exp(col(1) - m);
    const Scalar z = e0 + e1;
    delta(0, j) = e0 / z;
    delta(1, j) = e1 / z;
    delta(static_cast<Index>(labels[static_cast<std::size_t>(j)]), j) -= Scalar(1);
  }
  delta /= static_cast<Scalar>(batch);

  LossAndGradients<Scalar> out;
  out.loss = total / static_cast<double>(batch);
  out.grads.resize(net.params().size());
  std::size_t ip = net.params().size();
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (layers[i].kind == LayerKind::InnerProduct) {
      const auto& p = net.params()[--ip];
      out.grads[ip].weights = delta * acts[i].transpose();
      out.grads[ip].bias = delta.rowwise().sum();
      if (i > 0) delta = p.weights.transpose() * delta;
    } else {
      delta = delta.cwiseProduct((acts[i].array() > Scalar(0)).matrix().template cast<Scalar>());
    }
  }
  return out;
}

template <typename Scalar>
Gradients<Scalar> gradients(const Mlp<Scalar>& net, const Matrix<Scalar>& inputs, std::span<const Label> labels) {
  return loss_and_gradients(net, inputs, labels).grads;
}

template <typename Scalar>
struct SgdState {
  Gradients<Scalar> velocity;
};

/// v <- momentum * v - lr * g; param <- param + v.
template <typename Scalar>
void sgd_step(Mlp<Scalar>& net, const Gradients<Scalar>& grads, SgdState<Scalar>& state, double learning_rate,
              double momentum) {
  auto& params = net.params();
  if (grads.size() != params.size()) throw std::invalid_argument("sgd_step: gradient shape mismatch");
  if (state.velocity.empty()) {
    for (const auto& p : params)
      state.velocity.push_back({Matrix<Scalar>::Zero(p.weights.rows(), p.weights.cols()),
                                Vector<Scalar>::Zero(p.bias.size())});
  }
  const auto lr = static_cast<Scalar>(learning_rate);
  const auto mu = static_cast<Scalar>(momentum);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& v = state.velocity[i];
    if (grads[i].weights.rows() != v.weights.rows() || grads[i].weights.cols() != v.weights.cols() ||
        grads[i].bias.size() != v.bias.size())
      throw std::invalid_argument("sgd_step: gradient shape mismatch");
    v.weights = mu * v.weights - lr * grads[i].weights;
    v.bias = mu * v.bias - lr * grads[i].bias;
    params[i].weights += v.weights;
    params[i].bias += v.bias;
  }
}

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  Index minibatch_size = 64;
  int initial_tickets = 100;
  int ticket_cap = 100;
  int augment_period_epochs = 5;
  int max_epochs = 3000;
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct ModelMetadata {
  std::string task_kind;
  Index feature_dim = 0;
  std::string architecture;
  std::uint64_t training_seed = 0;
  double best_test_loss = std::numeric_limits<double>::quiet_NaN();
  int epochs = 0;
  TrainConfig train_config;
};

/// Standardized features beyond this many deviations carry no extra signal.
inline constexpr double kFeatureClip = 32.0;
inline constexpr double kStdFloor = 1e-8;

/// (x - mean) / std, clipped to [-kFeatureClip, kFeatureClip]; NaN maps to +kFeatureClip.
template <typename Scalar, typename DerivedX, typename DerivedM, typename DerivedS>
Vector<Scalar> standardize(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedM>& mean,
                           const Eigen::MatrixBase<DerivedS>& stdev) {
  if (x.size() != mean.size() || x.size() != stdev.size())
    throw std::invalid_argument("standardize: wrong feature length");
  Vector<Scalar> z(x.size());
  const auto clip = static_cast<Scalar>(kFeatureClip);
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar v = (static_cast<Scalar>(x(i)) - static_cast<Scalar>(mean(i))) / static_cast<Scalar>(stdev(i));
    z(i) = std::isnan(v) ? clip : std::clamp(v, -clip, clip);
  }
  return z;
}

struct DetectorModel {
  Mlp<float> net;
  Vector<float> feature_mean;
  Vector<float> feature_std;
  ModelMetadata metadata;

  Index feature_dim() const { return net.input_dim(); }
  /// Shapes and normalization consistency; throws std::invalid_argument.
  void validate() const;
};

/// Standardizes the feature vector then applies the layers; 2 raw scores.
Vector<float> forward(const DetectorModel& model, const FeatureVector& fv);

Label classify(const DetectorModel& model, const FeatureVector& fv);

/// Cycle proxy for one inference: 2 flops per multiply-accumulate plus one per
/// ReLU unit. Standardization folds into the first layer at deployment.
double forward_cost(const DetectorModel& model);

}  // namespace sdc
