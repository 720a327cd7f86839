#include "sdc/trainer.hpp"

#include "sdc/util.hpp"

#include <cmath>
#include <numeric>

namespace sdc {

void ProfileDataset::validate() const {
  if (feature_dim <= 0) throw ValidationError("profile: feature_dim must be positive");
  if (!dimension_names.empty() && static_cast<Index>(dimension_names.size()) != feature_dim)
    throw ValidationError("profile: dimension name count does not match feature_dim");
  for (const auto& v : vectors) {
    if (v.size() != feature_dim) throw ValidationError("profile: vector length does not match feature_dim");
    if (!v.allFinite()) throw ValidationError("profile: non-finite feature value");
  }
}

ProfileSplit split_profile(const ProfileDataset& profile, double ratio, Rng& rng) {
  const std::size_t n = profile.vectors.size();
  if (n < 10) throw std::invalid_argument("split_profile: need at least 10 vectors");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split_profile: ratio must be in (0,1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  auto n_train = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  n_train = std::min(n_train, n - 1);
  ProfileSplit split;
  split.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  for (auto i : split.train_indices) split.train.push_back(profile.vectors[i]);
  for (auto i : split.test_indices) split.test.push_back(profile.vectors[i]);
  return split;
}

TicketState ticket_update(TicketState state, double test_loss, int ticket_cap) {
  const bool decreased = state.previous_loss && test_loss < *state.previous_loss;
  if (decreased)
    state.tickets = std::min(state.tickets + 1, ticket_cap);
  else
    state.tickets -= 2;
  state.previous_loss = test_loss;
  state.best_test_loss = std::min(state.best_test_loss, test_loss);
  ++state.epoch;
  return state;
}

std::pair<Vector<float>, Vector<float>> feature_statistics(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("feature_statistics: empty set");
  const Index n = vectors.front().size();
  Vector<double> mean = Vector<double>::Zero(n);
  for (const auto& v : vectors) mean += v.cast<double>();
  mean /= static_cast<double>(vectors.size());
  Vector<double> var = Vector<double>::Zero(n);
  for (const auto& v : vectors) var += (v.cast<double>() - mean).cwiseAbs2();
  var /= static_cast<double>(vectors.size());
  Vector<float> sd = var.cwiseSqrt().cwiseMax(kStdFloor).cast<float>();
  sd = sd.cwiseMax(static_cast<float>(kStdFloor));
  return {mean.cast<float>(), sd};
}

namespace {

struct EncodedSet {
  Matrix<double> inputs;  // standardized, one column per sample
  std::vector<Label> labels;
};

EncodedSet encode(const std::vector<LabeledSample>& samples, const Vector<float>& mean, const Vector<float>& sd) {
  EncodedSet set;
  set.inputs.resize(mean.size(), static_cast<Index>(samples.size()));
  set.labels.reserve(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    set.inputs.col(static_cast<Index>(j)) = standardize<double>(samples[j].features, mean, sd);
    set.labels.push_back(samples[j].label);
  }
  return set;
}

double mean_loss(const Mlp<double>& net, const EncodedSet& set) {
  const Matrix<double> logits = net.forward_batch(set.inputs);
  double total = 0.0;
  for (Index j = 0; j < logits.cols(); ++j) total += loss(logits.col(j), set.labels[static_cast<std::size_t>(j)]);
  return total / static_cast<double>(logits.cols());
}

}  // namespace

TrainingResult train_detector(const ArchitectureSpec& arch, std::span<const FeatureVector> train_set,
                              std::span<const FeatureVector> test_set, const TrainConfig& config,
                              const PerturbationParams& params, const std::string& task_kind) {
  config.validate();
  params.validate();
  if (train_set.empty() || test_set.empty()) throw std::invalid_argument("train_detector: empty train or test set");
  for (const auto& v : train_set)
    if (v.size() != arch.input_dim) throw std::invalid_argument("train_detector: feature length does not match architecture");
  for (const auto& v : test_set)
    if (v.size() != arch.input_dim) throw std::invalid_argument("train_detector: feature length does not match architecture");

  const auto [mean, sd] = feature_statistics(train_set);
  const std::span<const float> sd_span(sd.data(), static_cast<std::size_t>(sd.size()));

  Rng init_rng = Rng::stream(config.rng_seed, 0);
  Rng train_aug = Rng::stream(config.rng_seed, 1);
  Rng test_aug = Rng::stream(config.rng_seed, 2);
  Rng order_rng = Rng::stream(config.rng_seed, 3);

  Mlp<double> net(arch.layers());
  initialize_weights(net, init_rng);
  Mlp<double> best = net;
  SgdState<double> sgd;

  TrainingResult result;
  TicketState tickets;
  tickets.tickets = config.initial_tickets;

  EncodedSet train_enc;
  EncodedSet test_enc;
  std::vector<Index> order;
  const Index batch = config.minibatch_size;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (epoch % config.augment_period_epochs == 0) {
      train_enc = encode(balanced_epoch_set(train_set, params, sd_span, train_aug), mean, sd);
      test_enc = encode(balanced_epoch_set(test_set, params, sd_span, test_aug), mean, sd);
      order.resize(static_cast<std::size_t>(train_enc.inputs.cols()));
      std::iota(order.begin(), order.end(), Index{0});
    }
    order_rng.shuffle(order.begin(), order.end());

    double train_total = 0.0;
    Matrix<double> xb;
    std::vector<Label> yb;
    for (Index start = 0; start < static_cast<Index>(order.size()); start += batch) {
      const Index len = std::min<Index>(batch, static_cast<Index>(order.size()) - start);
      xb.resize(train_enc.inputs.rows(), len);
      yb.resize(static_cast<std::size_t>(len));
      for (Index k = 0; k < len; ++k) {
        const Index src = order[static_cast<std::size_t>(start + k)];
        xb.col(k) = train_enc.inputs.col(src);
        yb[static_cast<std::size_t>(k)] = train_enc.labels[static_cast<std::size_t>(src)];
      }
      auto lg = loss_and_gradients(net, xb, yb);
      train_total += lg.loss * static_cast<double>(len);
      sgd_step(net, lg.grads, sgd, config.learning_rate, config.momentum);
    }
    const double train_loss = train_total / static_cast<double>(order.size());
    const double test_loss = mean_loss(net, test_enc);
    if (!std::isfinite(train_loss) || !std::isfinite(test_loss)) throw TrainingDiverged();

    if (test_loss < tickets.best_test_loss) best = net;
    tickets = ticket_update(tickets, test_loss, config.ticket_cap);
    result.log.push_back({epoch + 1, train_loss, test_loss, tickets.tickets});
    if (tickets.exhausted()) break;
  }

  result.model.net = best.cast<float>();
  result.model.feature_mean = mean;
  result.model.feature_std = sd;
  result.model.metadata.task_kind = task_kind;
  result.model.metadata.feature_dim = arch.input_dim;
  result.model.metadata.architecture = arch.name;
  result.model.metadata.training_seed = config.rng_seed;
  result.model.metadata.best_test_loss = tickets.best_test_loss;
  result.model.metadata.epochs = tickets.epoch;
  result.model.metadata.train_config = config;
  return result;
}

std::uint64_t architecture_seed(std::uint64_t master_seed, std::size_t arch_index) {
  return derive_seed(master_seed, 1000 + arch_index);
}

std::vector<TrainingOutcome> train_all(const ProfileDataset& profile, const TrainConfig& config,
                                       const PerturbationParams& params, unsigned threads) {
  profile.validate();
  Rng split_rng = Rng::stream(config.rng_seed, 0x5b117);
  const ProfileSplit split = split_profile(profile, kDefaultSplitRatio, split_rng);
  const auto archs = synthesize(profile.feature_dim);

  std::vector<TrainingOutcome> outcomes(archs.size());
  parallel_for(archs.size(), threads, [&](std::size_t i) {
    outcomes[i].arch = archs[i];
    TrainConfig cfg = config;
    cfg.rng_seed = architecture_seed(config.rng_seed, i);
    try {
      outcomes[i].result = train_detector(archs[i], split.train, split.test, cfg, params, profile.task_kind);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });
  return outcomes;
}

}  // namespace sdc
