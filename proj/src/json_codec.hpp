#pragma once

// nlohmann::json helpers shared by the model, manifest and report codecs.
// Readers carry a dotted field path so validation errors name the field.

#include "sdc/types.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace sdc::json_codec {

using Json = nlohmann::ordered_json;

/// Non-finite reals are written as the strings "inf", "-inf", "nan".
inline Json real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const Json& node() const { return node_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ValidationError(path_ + ": " + what); }

  bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

  Reader at(const char* key) const {
    if (!node_.is_object()) fail("expected object");
    auto it = node_.find(key);
    if (it == node_.end()) Reader(node_, child(key)).fail("missing field");
    return Reader(*it, child(key));
  }

  Reader at(std::size_t i) const { return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected array");
    return node_.size();
  }

  double as_real() const {
    if (node_.is_number()) return node_.get<double>();
    if (node_.is_string()) {
      const auto& s = node_.get_ref<const std::string&>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    fail("expected number");
  }

  std::int64_t as_int() const {
    if (!node_.is_number_integer()) fail("expected integer");
    return node_.get<std::int64_t>();
  }

  std::uint64_t as_uint() const {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<std::int64_t>() >= 0))
      fail("expected non-negative integer");
    return node_.get<std::uint64_t>();
  }

  bool as_bool() const {
    if (!node_.is_boolean()) fail("expected boolean");
    return node_.get<bool>();
  }

  std::string as_string() const {
    if (!node_.is_string()) fail("expected string");
    return node_.get<std::string>();
  }

  // Optional-field variants keep `out` unchanged when the key is absent.
  void opt(const char* key, double& out) const { if (has(key)) out = at(key).as_real(); }
  void opt(const char* key, int& out) const { if (has(key)) out = static_cast<int>(at(key).as_int()); }
  void opt(const char* key, Index& out) const { if (has(key)) out = static_cast<Index>(at(key).as_int()); }
  void opt(const char* key, std::uint64_t& out) const { if (has(key)) out = at(key).as_uint(); }
  void opt(const char* key, bool& out) const { if (has(key)) out = at(key).as_bool(); }
  void opt(const char* key, std::string& out) const { if (has(key)) out = at(key).as_string(); }

 private:
  std::string child(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  const Json& node_;
  std::string path_;
};

inline Json parse(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace sdc::json_codec

namespace sdc {
struct TrainConfig;
namespace json_codec {
// Defined in model_io.cpp; the manifest embeds the same block.
Json train_config_json(const TrainConfig& c);
TrainConfig parse_train_config(const Reader& r);
}  // namespace json_codec
}  // namespace sdc
