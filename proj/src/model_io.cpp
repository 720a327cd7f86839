#include "sdc/model_io.hpp"

#include "json_codec.hpp"
#include "sdc/util.hpp"

#include <charconv>
#include <cstdlib>

namespace sdc {

using json_codec::Json;
using json_codec::Reader;

namespace {

// The double nearest the shortest decimal that round-trips the float, so the
// document carries short literals instead of the float's exact binary value.
double short_decimal(float f) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, f);
  *res.ptr = '\0';
  return std::strtod(buf, nullptr);
}

template <typename Derived>
Json float_array(const Eigen::DenseBase<Derived>& values) {
  Json arr = Json::array();
  for (Index i = 0; i < values.size(); ++i) arr.push_back(short_decimal(values.derived()(i)));
  return arr;
}

Vector<float> read_floats(const Reader& r, Index expected) {
  const auto n = r.size();
  if (static_cast<Index>(n) != expected)
    r.fail("expected " + std::to_string(expected) + " values, found " + std::to_string(n));
  Vector<float> v(expected);
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Index>(i)) = static_cast<float>(r.at(i).as_real());
  return v;
}

const char* kind_name(LayerKind k) { return k == LayerKind::InnerProduct ? "inner_product" : "relu"; }

}  // namespace

Json json_codec::train_config_json(const TrainConfig& c) {
  Json j;
  j["learning_rate"] = c.learning_rate;
  j["momentum"] = c.momentum;
  j["minibatch_size"] = c.minibatch_size;
  j["initial_tickets"] = c.initial_tickets;
  j["ticket_cap"] = c.ticket_cap;
  j["augment_period_epochs"] = c.augment_period_epochs;
  j["max_epochs"] = c.max_epochs;
  j["rng_seed"] = c.rng_seed;
  return j;
}

TrainConfig json_codec::parse_train_config(const Reader& r) {
  if (!r.node().is_object()) r.fail("expected object");
  TrainConfig c;
  r.opt("learning_rate", c.learning_rate);
  r.opt("momentum", c.momentum);
  r.opt("minibatch_size", c.minibatch_size);
  r.opt("initial_tickets", c.initial_tickets);
  r.opt("ticket_cap", c.ticket_cap);
  r.opt("augment_period_epochs", c.augment_period_epochs);
  r.opt("max_epochs", c.max_epochs);
  r.opt("rng_seed", c.rng_seed);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return c;
}

std::string serialize_model(const DetectorModel& model) {
  model.validate();
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  const auto& m = model.metadata;
  Json meta;
  meta["task_kind"] = m.task_kind;
  meta["feature_dim"] = m.feature_dim;
  meta["architecture"] = m.architecture;
  meta["training_seed"] = m.training_seed;
  meta["best_test_loss"] = json_codec::real(m.best_test_loss);
  meta["epochs"] = m.epochs;
  meta["train_config"] = json_codec::train_config_json(m.train_config);
  doc["metadata"] = std::move(meta);

  Json layers = Json::array();
  for (const auto& l : model.net.layers())
    layers.push_back(Json{{"kind", kind_name(l.kind)}, {"in_dim", l.in_dim}, {"out_dim", l.out_dim}});
  doc["layers"] = std::move(layers);

  doc["normalization"] = Json{{"mean", float_array(model.feature_mean)}, {"std", float_array(model.feature_std)}};

  Json params = Json::array();
  for (const auto& p : model.net.params()) {
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = p.weights;
    params.push_back(Json{{"weights", float_array(w.reshaped<Eigen::RowMajor>())}, {"bias", float_array(p.bias)}});
  }
  doc["parameters"] = std::move(params);
  return doc.dump(2) + "\n";
}

DetectorModel parse_model(std::string_view text) {
  const Json doc = json_codec::parse(text, "model");
  const Reader root(doc, "model");
  const auto version = root.at("format_version").as_int();
  if (version != kModelFormatVersion)
    root.at("format_version").fail("unsupported version " + std::to_string(version));

  std::vector<LayerSpec> layers;
  const auto lr = root.at("layers");
  for (std::size_t i = 0; i < lr.size(); ++i) {
    const auto l = lr.at(i);
    LayerSpec spec;
    const auto kind = l.at("kind").as_string();
    if (kind == "inner_product")
      spec.kind = LayerKind::InnerProduct;
    else if (kind == "relu")
      spec.kind = LayerKind::Relu;
    else
      l.at("kind").fail("unknown layer kind '" + kind + "'");
    spec.in_dim = static_cast<Index>(l.at("in_dim").as_int());
    spec.out_dim = static_cast<Index>(l.at("out_dim").as_int());
    layers.push_back(spec);
  }

  DetectorModel model;
  try {
    model.net = Mlp<float>(layers);
  } catch (const std::invalid_argument& e) {
    lr.fail(e.what());
  }

  const auto meta = root.at("metadata");
  auto& m = model.metadata;
  m.task_kind = meta.at("task_kind").as_string();
  m.feature_dim = static_cast<Index>(meta.at("feature_dim").as_int());
  m.architecture = meta.at("architecture").as_string();
  m.training_seed = meta.at("training_seed").as_uint();
  m.best_test_loss = meta.at("best_test_loss").as_real();
  m.epochs = static_cast<int>(meta.at("epochs").as_int());
  m.train_config = json_codec::parse_train_config(meta.at("train_config"));

  const Index n = model.net.input_dim();
  const auto norm = root.at("normalization");
  model.feature_mean = read_floats(norm.at("mean"), n);
  model.feature_std = read_floats(norm.at("std"), n);

  const auto pr = root.at("parameters");
  if (pr.size() != model.net.params().size()) pr.fail("parameter block count does not match layers");
  for (std::size_t i = 0; i < pr.size(); ++i) {
    auto& p = model.net.params()[i];
    const auto w = read_floats(pr.at(i).at("weights"), p.weights.size());
    p.weights = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), p.weights.rows(), p.weights.cols());
    p.bias = read_floats(pr.at(i).at("bias"), p.bias.size());
  }

  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    root.fail(e.what());
  }
  return model;
}

void save_model(const std::filesystem::path& path, const DetectorModel& model) {
  write_file_atomic(path, serialize_model(model));
}

DetectorModel load_model(const std::filesystem::path& path) {
  try {
    return parse_model(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string model_filename(const std::string& architecture) { return "model_" + architecture + ".json"; }

}  // namespace sdc
