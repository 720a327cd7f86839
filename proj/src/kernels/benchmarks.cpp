#include "sdc/kernels/benchmarks.hpp"

#include "sdc/kernels/blackscholes.hpp"
#include "sdc/kernels/dct.hpp"
#include "sdc/kernels/inversek2j.hpp"
#include "sdc/kernels/sobel.hpp"
#include "sdc/util.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

namespace sdc {

namespace {

TaskOutput to_output(const auto& values) {
  TaskOutput out(static_cast<std::size_t>(values.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(values(static_cast<Index>(i)));
  return out;
}

std::vector<float> concat(std::span<const TaskOutput> outputs) {
  std::vector<float> all;
  for (const auto& o : outputs) all.insert(all.end(), o.begin(), o.end());
  return all;
}

void check_output_count(const Workload& w, std::span<const TaskOutput> a, std::span<const TaskOutput> b) {
  if (a.size() != w.inputs.size() || b.size() != w.inputs.size())
    throw std::invalid_argument("quality: output count does not match workload");
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

SyntheticImageStyle image_style(RangeProfile profile) {
  SyntheticImageStyle style;
  if (profile == RangeProfile::Train) {
    style.gradient_angle_min = 0.0;
    style.gradient_angle_max = std::numbers::pi;
  } else {
    style.gradient_angle_min = std::numbers::pi;
    style.gradient_angle_max = 2.0 * std::numbers::pi;
  }
  return style;
}

class DctBenchmark final : public Benchmark {
 public:
  DctBenchmark() {
    kind_.name = "dct";
    kind_.feature_dim = 10;
    kind_.output_len = 8;
    kind_.feature_names = numbered("c", 8);
    kind_.feature_names.push_back("row_offset");
    kind_.feature_names.push_back("col_offset");
    kind_.run = [](std::span<const double> in) {
      const dct::Block block = Eigen::Map<const Eigen::Matrix<double, 8, 8, Eigen::RowMajor>>(in.data());
      const dct::SubBlock coeffs = dct::task(block, static_cast<int>(in[64]));
      const Eigen::Matrix<double, 2, 4, Eigen::RowMajor> rm = coeffs;
      return to_output(Eigen::Map<const Eigen::Matrix<double, 8, 1>>(rm.data()));
    };
    kind_.feature_of = [](std::span<const double> in, std::span<const float> out) {
      const auto off = dct::sub_block_offset(static_cast<int>(in[64]));
      FeatureVector fv(10);
      for (Index i = 0; i < 8; ++i) fv(i) = out[static_cast<std::size_t>(i)];
      fv(8) = static_cast<float>(off.row) / 6.0f;
      fv(9) = static_cast<float>(off.col) / 4.0f;
      return fv;
    };
    kind_.cycle_cost = [](std::span<const double>) { return dct::kTaskCost; };
    kind_.always_reliable = [](std::span<const double> in) { return static_cast<int>(in[64]) == 0; };
  }

  Workload generate_inputs(RangeProfile profile, const InputSpec& spec, Rng& rng) const override {
    Workload w;
    w.images = load_images(profile, spec, rng);
    for (std::size_t img = 0; img < w.images.size(); ++img) {
      const auto& image = w.images[img];
      if (image.rows() % 8 != 0 || image.cols() % 8 != 0)
        throw ValidationError("dct: image dimensions must be multiples of 8");
      for (Index by = 0; by < image.rows() / 8; ++by)
        for (Index bx = 0; bx < image.cols() / 8; ++bx)
          for (int s = 0; s < dct::kSubBlocks; ++s) {
            TaskInput in(68);
            for (int r = 0; r < 8; ++r)
              for (int c = 0; c < 8; ++c) in[static_cast<std::size_t>(r * 8 + c)] = image(by * 8 + r, bx * 8 + c);
            in[64] = s;
            in[65] = static_cast<double>(by);
            in[66] = static_cast<double>(bx);
            in[67] = static_cast<double>(img);
            w.inputs.push_back(std::move(in));
          }
    }
    return w;
  }

  QualityReport quality(const Workload& w, std::span<const TaskOutput> final_outputs,
                        std::span<const TaskOutput> reliable_outputs) const override {
    check_output_count(w, final_outputs, reliable_outputs);
    QualityReport q;
    q.kind = QualityKind::PsnrDb;
    q.value = mean_psnr(w, final_outputs);
    q.baseline_value = mean_psnr(w, reliable_outputs);
    return q;
  }

  std::vector<Index> perturbable_indices() const override { return {0, 1, 2, 3, 4, 5, 6, 7}; }

 private:
  static double mean_psnr(const Workload& w, std::span<const TaskOutput> outputs) {
    std::vector<Eigen::MatrixXd> coeffs;
    for (const auto& img : w.images) coeffs.emplace_back(Eigen::MatrixXd::Zero(img.rows(), img.cols()));
    for (std::size_t t = 0; t < w.inputs.size(); ++t) {
      const auto& in = w.inputs[t];
      const auto off = dct::sub_block_offset(static_cast<int>(in[64]));
      auto& c = coeffs.at(static_cast<std::size_t>(in[67]));
      const auto by = static_cast<Index>(in[65]) * 8 + off.row;
      const auto bx = static_cast<Index>(in[66]) * 8 + off.col;
      for (int k = 0; k < 8; ++k) c(by + k / 4, bx + k % 4) = outputs[t][static_cast<std::size_t>(k)];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < w.images.size(); ++i) sum += dct::quality_psnr(w.images[i], coeffs[i]);
    return sum / static_cast<double>(w.images.size());
  }
};

class BlackscholesBenchmark final : public Benchmark {
 public:
  BlackscholesBenchmark() {
    kind_.name = "blackscholes";
    kind_.feature_dim = 8;
    kind_.output_len = 1;
    kind_.feature_names = {"spot", "strike", "rate", "dividend", "volatility", "maturity", "type", "price"};
    kind_.run = [](std::span<const double> in) {
      return TaskOutput{static_cast<float>(blackscholes::price(decode(in)))};
    };
    kind_.feature_of = [](std::span<const double> in, std::span<const float> out) {
      FeatureVector fv(8);
      for (Index i = 0; i < 7; ++i) fv(i) = static_cast<float>(in[static_cast<std::size_t>(i)]);
      fv(7) = out[0];
      return fv;
    };
    kind_.cycle_cost = [](std::span<const double>) { return blackscholes::kTaskCost; };
  }

  static blackscholes::OptionParams decode(std::span<const double> in) {
    if (in.size() != 7) throw std::invalid_argument("blackscholes: input must have 7 fields");
    return {in[0], in[1], in[2], in[3], in[4], in[5],
            in[6] != 0.0 ? blackscholes::OptionType::Put : blackscholes::OptionType::Call};
  }

  Workload generate_inputs(RangeProfile profile, const InputSpec& spec, Rng& rng) const override {
    if (spec.count == 0) throw ValidationError("inputs.count must be positive");
    const double lo = profile == RangeProfile::Train ? 20.0 : 100.0;
    const double hi = profile == RangeProfile::Train ? 100.0 : 120.0;
    Workload w;
    w.inputs.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
      const double spot = rng.uniform(lo, hi);
      const double strike = spot * rng.uniform(0.8, 1.2);
      const double rate = rng.uniform(0.01, 0.08);
      const double dividend = rng.uniform(0.0, 0.04);
      const double vol = rng.uniform(0.1, 0.5);
      const double maturity = rng.uniform(0.25, 2.0);
      const double type = rng.bernoulli(0.5) ? 1.0 : 0.0;
      // Stored at float precision so features and inputs agree exactly.
      TaskInput in{spot, strike, rate, dividend, vol, maturity, type};
      for (auto& v : in) v = static_cast<double>(static_cast<float>(v));
      w.inputs.push_back(std::move(in));
    }
    return w;
  }

  QualityReport quality(const Workload& w, std::span<const TaskOutput> final_outputs,
                        std::span<const TaskOutput> reliable_outputs) const override {
    check_output_count(w, final_outputs, reliable_outputs);
    return {QualityKind::MeanRelativeError, elementwise_relative_error(concat(final_outputs), concat(reliable_outputs)),
            0.0};
  }

  std::vector<Index> perturbable_indices() const override { return {7}; }
};

class SobelBenchmark final : public Benchmark {
 public:
  SobelBenchmark() {
    kind_.name = "sobel";
    kind_.feature_dim = sobel::kTileWidth;
    kind_.output_len = sobel::kTileWidth;
    kind_.feature_names = numbered("e", static_cast<int>(sobel::kTileWidth));
    kind_.run = [](std::span<const double> in) {
      const sobel::Strip strip =
          Eigen::Map<const Eigen::Matrix<double, 3, sobel::kTileWidth + 2, Eigen::RowMajor>>(in.data());
      return to_output(sobel::row(strip));
    };
    kind_.feature_of = [](std::span<const double>, std::span<const float> out) {
      return FeatureVector(Eigen::Map<const FeatureVector>(out.data(), static_cast<Index>(out.size())));
    };
    kind_.cycle_cost = [](std::span<const double>) { return sobel::kTaskCost; };
  }

  Workload generate_inputs(RangeProfile profile, const InputSpec& spec, Rng& rng) const override {
    constexpr Index tile = sobel::kTileWidth;
    Workload w;
    w.images = load_images(profile, spec, rng);
    for (std::size_t img = 0; img < w.images.size(); ++img) {
      const auto& image = w.images[img];
      if (image.cols() % tile != 0 || image.rows() < 1)
        throw ValidationError("sobel: image width must be a multiple of 16");
      const auto px = [&](Index r, Index c) {
        return image(std::clamp<Index>(r, 0, image.rows() - 1), std::clamp<Index>(c, 0, image.cols() - 1));
      };
      for (Index r = 0; r < image.rows(); ++r)
        for (Index t = 0; t < image.cols() / tile; ++t) {
          TaskInput in(3 * (tile + 2) + 3);
          for (Index dr = 0; dr < 3; ++dr)
            for (Index dc = 0; dc < tile + 2; ++dc)
              in[static_cast<std::size_t>(dr * (tile + 2) + dc)] = px(r - 1 + dr, t * tile - 1 + dc);
          in[54] = static_cast<double>(img);
          in[55] = static_cast<double>(r);
          in[56] = static_cast<double>(t);
          w.inputs.push_back(std::move(in));
        }
    }
    return w;
  }

  QualityReport quality(const Workload& w, std::span<const TaskOutput> final_outputs,
                        std::span<const TaskOutput> reliable_outputs) const override {
    check_output_count(w, final_outputs, reliable_outputs);
    const auto a = concat(final_outputs);
    const auto b = concat(reliable_outputs);
    return {QualityKind::PsnrDb, psnr(std::span<const float>(a), std::span<const float>(b)),
            psnr(std::span<const float>(b), std::span<const float>(b))};
  }

  std::vector<Index> perturbable_indices() const override {
    std::vector<Index> all(sobel::kTileWidth);
    for (Index i = 0; i < sobel::kTileWidth; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
};

class Inversek2jBenchmark final : public Benchmark {
 public:
  Inversek2jBenchmark() {
    kind_.name = "inversek2j";
    kind_.feature_dim = 4;
    kind_.output_len = 2;
    kind_.feature_names = {"x", "y", "theta1", "theta2"};
    kind_.run = [](std::span<const double> in) {
      const auto a = inversek2j::solve({in[0], in[1]});
      return TaskOutput{static_cast<float>(a.theta1), static_cast<float>(a.theta2)};
    };
    kind_.feature_of = [](std::span<const double> in, std::span<const float> out) {
      FeatureVector fv(4);
      fv << static_cast<float>(in[0]), static_cast<float>(in[1]), out[0], out[1];
      return fv;
    };
    kind_.cycle_cost = [](std::span<const double>) { return inversek2j::kTaskCost; };
  }

  Workload generate_inputs(RangeProfile profile, const InputSpec& spec, Rng& rng) const override {
    if (spec.count == 0) throw ValidationError("inputs.count must be positive");
    Workload w;
    w.inputs.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
      double theta2 = 0.0;
      if (profile == RangeProfile::Train) {
        // Two bands of total width 2.4; pick proportionally to their widths.
        const double u = rng.uniform(0.0, 2.4);
        theta2 = u < 1.4 ? 0.1 + u : 2.0 + (u - 1.4);
      } else {
        theta2 = rng.uniform(1.5, 2.0);
      }
      const double theta1 = rng.uniform(0.0, std::numbers::pi / 2.0);
      const auto p = inversek2j::forward({theta1, theta2});
      w.inputs.push_back({static_cast<double>(static_cast<float>(p.x)), static_cast<double>(static_cast<float>(p.y))});
    }
    return w;
  }

  QualityReport quality(const Workload& w, std::span<const TaskOutput> final_outputs,
                        std::span<const TaskOutput> reliable_outputs) const override {
    check_output_count(w, final_outputs, reliable_outputs);
    return {QualityKind::MeanRelativeError, elementwise_relative_error(concat(final_outputs), concat(reliable_outputs)),
            0.0};
  }

  std::vector<Index> perturbable_indices() const override { return {2, 3}; }
};

}  // namespace

std::vector<GrayImage> load_images(RangeProfile profile, const InputSpec& spec, Rng& rng) {
  const auto& paths = profile == RangeProfile::Train ? spec.train_images : spec.validation_images;
  std::vector<GrayImage> images;
  if (!paths.empty()) {
    for (const auto& p : paths) {
      if (!std::filesystem::exists(p)) throw ValidationError("image file not found: " + p);
      images.push_back(read_pgm(p));
    }
    return images;
  }
  if (!spec.synthetic_fallback) throw ValidationError("no image files given and synthetic fallback disabled");
  if (spec.synthetic_images == 0 || spec.image_size <= 0)
    throw ValidationError("inputs: synthetic_images and image_size must be positive");
  const auto style = image_style(profile);
  for (std::size_t i = 0; i < spec.synthetic_images; ++i)
    images.push_back(synthetic_image(spec.image_size, spec.image_size, style, rng));
  return images;
}

std::unique_ptr<Benchmark> make_benchmark(std::string_view name) {
  if (name == "dct") return std::make_unique<DctBenchmark>();
  if (name == "blackscholes") return std::make_unique<BlackscholesBenchmark>();
  if (name == "sobel") return std::make_unique<SobelBenchmark>();
  if (name == "inversek2j") return std::make_unique<Inversek2jBenchmark>();
  throw ValidationError("unknown benchmark '" + std::string(name) + "'");
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{"dct", "blackscholes", "sobel", "inversek2j"};
  return names;
}

std::vector<TaskOutput> run_reliably(const TaskKind& kind, std::span<const TaskInput> inputs, unsigned threads) {
  std::vector<TaskOutput> out(inputs.size());
  parallel_for(inputs.size(), threads, [&](std::size_t i) { out[i] = kind.run(inputs[i]); });
  return out;
}

}  // namespace sdc
