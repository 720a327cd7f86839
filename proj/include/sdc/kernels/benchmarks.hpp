#pragma once

// Benchmark task kinds: reference kernels wrapped as tasks with feature
// extractors, cycle-cost models, input generators and quality pipelines.
//
// Input layouts (TaskInput):
//   dct           64 pixels (row-major 8x8), sub_block, block_row, block_col, image  -> 8 coefficients
//   blackscholes  spot, strike, rate, dividend, volatility, maturity, type(0 call, 1 put) -> price
//   sobel         54 pixels (row-major 3x18), image, row, tile                      -> 16 magnitudes
//   inversek2j    x, y                                                              -> theta1, theta2
//
// Feature vectors: dct = 8 coefficients + row_offset/6 + col_offset/4 (N=10);
// blackscholes = 7 inputs + price (N=8); sobel = the 16 outputs (N=16);
// inversek2j = x, y, theta1, theta2 (N=4).
//
// Train and validation profiles draw from disjoint ranges:
//   blackscholes  spot in [20, 100) vs [100, 120)
//   inversek2j    elbow angle in [0.1, 1.5) U [2.0, 3.0) vs [1.5, 2.0)
//   dct, sobel    synthetic gradient orientation in [0, pi) vs [pi, 2 pi)

#include "sdc/harness.hpp"
#include "sdc/kernels/image.hpp"
#include "sdc/metrics.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdc {

enum class RangeProfile { Train, Validation };

struct InputSpec {
  /// Task count for blackscholes and inversek2j.
  std::size_t count = 20000;
  /// Side of each synthetic image (dct, sobel).
  Index image_size = 512;
  std::size_t synthetic_images = 1;
  std::vector<std::string> train_images;
  std::vector<std::string> validation_images;
  bool synthetic_fallback = true;

  bool operator==(const InputSpec&) const = default;
};

struct Workload {
  std::vector<TaskInput> inputs;
  std::vector<GrayImage> images;
};

class Benchmark {
 public:
  virtual ~Benchmark() = default;

  const TaskKind& kind() const { return kind_; }
  const std::string& name() const { return kind_.name; }

  virtual Workload generate_inputs(RangeProfile profile, const InputSpec& spec, Rng& rng) const = 0;

  /// Application-level quality of `final_outputs`; baseline_value is the same
  /// measure for `reliable_outputs`.
  virtual QualityReport quality(const Workload& workload, std::span<const TaskOutput> final_outputs,
                                std::span<const TaskOutput> reliable_outputs) const = 0;

  /// Feature positions a fault can reach (task outputs).
  virtual std::vector<Index> perturbable_indices() const = 0;

 protected:
  TaskKind kind_;
};

/// "dct", "blackscholes", "sobel" or "inversek2j"; throws ValidationError otherwise.
std::unique_ptr<Benchmark> make_benchmark(std::string_view name);

const std::vector<std::string>& benchmark_names();

/// Loads the profile's image list, or synthesizes images when the list is
/// empty and the fallback is enabled.
std::vector<GrayImage> load_images(RangeProfile profile, const InputSpec& spec, Rng& rng);

/// Reliable outputs of every task, in order.
std::vector<TaskOutput> run_reliably(const TaskKind& kind, std::span<const TaskInput> inputs, unsigned threads = 1);

}  // namespace sdc
