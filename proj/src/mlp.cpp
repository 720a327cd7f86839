#include "sdc/mlp.hpp"

namespace sdc {

void validate_layers(const std::vector<LayerSpec>& layers) {
  if (layers.empty()) throw std::invalid_argument("layers: empty network");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.in_dim <= 0 || l.out_dim <= 0) throw std::invalid_argument("layers: dimensions must be positive");
    if (l.kind == LayerKind::Relu && l.in_dim != l.out_dim)
      throw std::invalid_argument("layers: relu must preserve dimension");
    if (i > 0 && layers[i - 1].out_dim != l.in_dim)
      throw std::invalid_argument("layers: consecutive dimensions do not match");
  }
  if (layers.back().kind != LayerKind::InnerProduct || layers.back().out_dim != 2)
    throw std::invalid_argument("layers: final layer must be an inner product with 2 outputs");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train_config.learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("train_config.momentum must be in [0,1)");
  if (minibatch_size <= 0) throw std::invalid_argument("train_config.minibatch_size must be positive");
  if (augment_period_epochs <= 0) throw std::invalid_argument("train_config.augment_period_epochs must be positive");
  if (ticket_cap <= 0 || initial_tickets > ticket_cap)
    throw std::invalid_argument("train_config: initial_tickets must not exceed ticket_cap");
  if (max_epochs <= 0) throw std::invalid_argument("train_config.max_epochs must be positive");
}

void DetectorModel::validate() const {
  validate_layers(net.layers());
  std::size_t ip = 0;
  for (const auto& l : net.layers()) {
    if (l.kind != LayerKind::InnerProduct) continue;
    const auto& p = net.params().at(ip++);
    if (p.weights.rows() != l.out_dim || p.weights.cols() != l.in_dim || p.bias.size() != l.out_dim)
      throw std::invalid_argument("model: parameter shape does not match layer spec");
  }
  if (ip != net.params().size()) throw std::invalid_argument("model: parameter count does not match layers");
  if (feature_mean.size() != net.input_dim() || feature_std.size() != net.input_dim())
    throw std::invalid_argument("model: normalization length does not match input dimension");
  if ((feature_std.array() <= 0.0f).any()) throw std::invalid_argument("model: feature_std must be positive");
}

Vector<float> forward(const DetectorModel& model, const FeatureVector& fv) {
  if (fv.size() != model.feature_dim()) throw std::invalid_argument("forward: wrong feature length");
  return model.net.forward(standardize<float>(fv, model.feature_mean, model.feature_std));
}

Label classify(const DetectorModel& model, const FeatureVector& fv) { return classify_logits(forward(model, fv)); }

double forward_cost(const DetectorModel& model) {
  return 2.0 * static_cast<double>(model.net.multiply_accumulates()) + static_cast<double>(model.net.relu_units());
}

}  // namespace sdc
