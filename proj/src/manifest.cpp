#include "sdc/manifest.hpp"

#include "json_codec.hpp"
#include "sdc/util.hpp"

#include <algorithm>
#include <cstdio>
#include <initializer_list>

namespace sdc {

using json_codec::Json;
using json_codec::Reader;

namespace {

void only_keys(const Reader& r, std::initializer_list<const char*> keys) {
  if (!r.node().is_object()) r.fail("expected object");
  for (const auto& [key, value] : r.node().items()) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
    if (!known) r.fail("unknown field '" + key + "'");
  }
}

std::vector<std::string> read_strings(const Reader& r) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < r.size(); ++i) out.push_back(r.at(i).as_string());
  return out;
}

InputSpec parse_inputs(const Reader& r) {
  only_keys(r, {"count", "image_size", "synthetic_images", "train_images", "validation_images", "synthetic_fallback"});
  InputSpec s;
  r.opt("count", s.count);
  r.opt("image_size", s.image_size);
  r.opt("synthetic_images", s.synthetic_images);
  if (r.has("train_images")) s.train_images = read_strings(r.at("train_images"));
  if (r.has("validation_images")) s.validation_images = read_strings(r.at("validation_images"));
  r.opt("synthetic_fallback", s.synthetic_fallback);
  return s;
}

FaultModel parse_faults(const Reader& r) {
  only_keys(r, {"rate_per_cycle", "max_bits_per_fault", "rng_seed"});
  FaultModel f;
  r.opt("rate_per_cycle", f.rate_per_cycle);
  r.opt("max_bits_per_fault", f.max_bits_per_fault);
  r.opt("rng_seed", f.rng_seed);
  return f;
}

PolicySpec parse_policy(const Reader& r) {
  only_keys(r, {"detector", "batch_size", "gang_size"});
  PolicySpec p;
  r.opt("detector", p.detector);
  r.opt("batch_size", p.batch_size);
  r.opt("gang_size", p.gang_size);
  return p;
}

PerturbationParams parse_perturbation(const Reader& r) {
  only_keys(r, {"strategy_weights", "max_bits_flipped", "max_elements", "min_deviation", "scale_exclusion",
                "additive_sigma", "perturbable_indices"});
  PerturbationParams p;
  if (r.has("strategy_weights")) {
    const auto w = r.at("strategy_weights");
    if (w.size() != 3) w.fail("expected 3 weights");
    for (std::size_t i = 0; i < 3; ++i) p.strategy_weights[i] = w.at(i).as_real();
  }
  r.opt("max_bits_flipped", p.max_bits_flipped);
  r.opt("max_elements", p.max_elements);
  r.opt("min_deviation", p.min_deviation);
  r.opt("scale_exclusion", p.scale_exclusion);
  r.opt("additive_sigma", p.additive_sigma);
  if (r.has("perturbable_indices")) {
    const auto idx = r.at("perturbable_indices");
    for (std::size_t i = 0; i < idx.size(); ++i) p.perturbable_indices.push_back(static_cast<Index>(idx.at(i).as_int()));
  }
  return p;
}

FrequencyPair parse_frequency(const Reader& r) {
  only_keys(r, {"f_nominal", "f_overclocked", "v_nominal"});
  FrequencyPair f;
  r.opt("f_nominal", f.f_nominal);
  r.opt("f_overclocked", f.f_overclocked);
  r.opt("v_nominal", f.v_nominal);
  return f;
}

template <typename Fn>
void prefixed(Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("manifest.") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("manifest.") + e.what());
  }
}

}  // namespace

void validate_policy_name(const std::string& name) {
  if (name == "none" || name == "oracle" || name == "baseline") return;
  if (name.rfind("ann:", 0) == 0 && name.size() > 4) return;
  throw ValidationError("policy.detector: expected none, oracle, baseline or ann:NAME, got '" + name + "'");
}

void ExperimentManifest::validate() const {
  if (format_version != kManifestFormatVersion)
    throw ValidationError("manifest.format_version: unsupported version " + std::to_string(format_version));
  const auto& names = benchmark_names();
  if (std::find(names.begin(), names.end(), benchmark) == names.end())
    throw ValidationError("manifest.benchmark: unknown benchmark '" + benchmark + "'");
  if (inputs.count == 0) throw ValidationError("manifest.inputs.count: must be positive");
  if (inputs.image_size <= 0) throw ValidationError("manifest.inputs.image_size: must be positive");
  if (inputs.synthetic_images == 0) throw ValidationError("manifest.inputs.synthetic_images: must be positive");
  prefixed([&] { fault_model.validate(); });
  prefixed([&] { validate_policy_name(policy.detector); });
  if (policy.batch_size < 1) throw ValidationError("manifest.policy.batch_size: must be positive");
  if (policy.gang_size < policy.batch_size)
    throw ValidationError("manifest.policy.gang_size: must be at least batch_size");
  prefixed([&] { train.validate(); });
  prefixed([&] { perturbation.validate(); });
  prefixed([&] { frequency.validate(); });
  if (!(epsilon > 0.0)) throw ValidationError("manifest.epsilon: must be positive");
}

std::string serialize_manifest(const ExperimentManifest& m) {
  Json doc;
  doc["format_version"] = m.format_version;
  doc["benchmark"] = m.benchmark;
  doc["seed"] = m.seed;
  doc["inputs"] = Json{{"count", m.inputs.count},
                       {"image_size", m.inputs.image_size},
                       {"synthetic_images", m.inputs.synthetic_images},
                       {"train_images", m.inputs.train_images},
                       {"validation_images", m.inputs.validation_images},
                       {"synthetic_fallback", m.inputs.synthetic_fallback}};
  doc["fault_model"] = Json{{"rate_per_cycle", m.fault_model.rate_per_cycle},
                            {"max_bits_per_fault", m.fault_model.max_bits_per_fault},
                            {"rng_seed", m.fault_model.rng_seed}};
  doc["policy"] = Json{{"detector", m.policy.detector},
                       {"batch_size", m.policy.batch_size},
                       {"gang_size", m.policy.gang_size}};
  doc["train"] = json_codec::train_config_json(m.train);
  const auto& p = m.perturbation;
  doc["perturbation"] = Json{{"strategy_weights", p.strategy_weights},
                             {"max_bits_flipped", p.max_bits_flipped},
                             {"max_elements", p.max_elements},
                             {"min_deviation", p.min_deviation},
                             {"scale_exclusion", p.scale_exclusion},
                             {"additive_sigma", p.additive_sigma},
                             {"perturbable_indices", p.perturbable_indices}};
  doc["frequency"] = Json{{"f_nominal", m.frequency.f_nominal},
                          {"f_overclocked", m.frequency.f_overclocked},
                          {"v_nominal", m.frequency.v_nominal}};
  doc["epsilon"] = m.epsilon;
  return doc.dump(2) + "\n";
}

ExperimentManifest parse_manifest(std::string_view text) {
  const Json doc = json_codec::parse(text, "manifest");
  const Reader root(doc, "manifest");
  only_keys(root, {"format_version", "benchmark", "seed", "inputs", "fault_model", "policy", "train", "perturbation",
                   "frequency", "epsilon"});
  ExperimentManifest m;
  root.opt("format_version", m.format_version);
  if (m.format_version != kManifestFormatVersion)
    root.at("format_version").fail("unsupported version " + std::to_string(m.format_version));
  root.opt("benchmark", m.benchmark);
  root.opt("seed", m.seed);
  if (root.has("inputs")) m.inputs = parse_inputs(root.at("inputs"));
  if (root.has("fault_model")) m.fault_model = parse_faults(root.at("fault_model"));
  if (root.has("policy")) m.policy = parse_policy(root.at("policy"));
  if (root.has("train")) {
    const auto t = root.at("train");
    only_keys(t, {"learning_rate", "momentum", "minibatch_size", "initial_tickets", "ticket_cap",
                  "augment_period_epochs", "max_epochs", "rng_seed"});
    m.train = json_codec::parse_train_config(t);
  }
  if (root.has("perturbation")) m.perturbation = parse_perturbation(root.at("perturbation"));
  if (root.has("frequency")) m.frequency = parse_frequency(root.at("frequency"));
  root.opt("epsilon", m.epsilon);
  m.validate();
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

std::string manifest_hash(const ExperimentManifest& manifest) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_manifest(manifest)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sdc
