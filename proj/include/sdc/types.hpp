#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdc {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Values a detector inspects for one task (outputs, optionally inputs).
using FeatureVector = Vector<float>;

/// Task inputs travel as flat reals; each kernel documents its layout.
using TaskInput = std::vector<double>;
/// Task outputs are 32-bit floats; fault injection flips bits of this encoding.
using TaskOutput = std::vector<float>;

enum class Label : int { Correct = 0, Incorrect = 1 };

enum class Verdict { Correct, Incorrect, NotChecked };

std::string to_string(Verdict verdict);

/// Malformed user input (manifests, files, flags). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every candidate detector exceeds the overhead tolerance. Exit code 3.
class NoViableDetector : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdc
