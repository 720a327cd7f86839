#include "sdc/kernels/benchmarks.hpp"
#include "sdc/kernels/blackscholes.hpp"
#include "sdc/kernels/dct.hpp"
#include "sdc/kernels/image.hpp"
#include "sdc/kernels/inversek2j.hpp"
#include "sdc/kernels/sobel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace sdc {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

dct::Block random_block(Rng& rng) {
  dct::Block b;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) b(r, c) = std::floor(rng.uniform(0.0, 256.0));
  return b;
}

// Textbook quadruple sum.
double dct_coefficient(const dct::Block& x, int u, int v) {
  auto a = [](int k) { return k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0); };
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      s += x(i, j) * std::cos((2 * i + 1) * u * kPi / 16.0) * std::cos((2 * j + 1) * v * kPi / 16.0);
  return a(u) * a(v) * s;
}

TEST(Dct, MatchesBruteForceSum) {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const auto x = random_block(rng);
    const auto y = dct::forward(x);
    for (int u = 0; u < 8; ++u)
      for (int v = 0; v < 8; ++v) EXPECT_NEAR(y(u, v), dct_coefficient(x, u, v), 1e-9);
  }
}

TEST(Dct, SubBlockTasksTileTheTransform) {
  Rng rng(2);
  const auto x = random_block(rng);
  const auto y = dct::forward(x);
  for (int s = 0; s < dct::kSubBlocks; ++s) {
    const auto off = dct::sub_block_offset(s);
    EXPECT_EQ(off.row, 2 * (s / 2));
    EXPECT_EQ(off.col, 4 * (s % 2));
    const auto part = dct::task(x, s);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 4; ++c) EXPECT_NEAR(part(r, c), y(off.row + r, off.col + c), 1e-9);
  }
}

TEST(Dct, InverseRoundTripParsevalLinearity) {
  Rng rng(3);
  const auto x = random_block(rng);
  const auto z = random_block(rng);
  const auto y = dct::forward(x);
  EXPECT_LT((dct::inverse(y) - x).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(y.squaredNorm(), x.squaredNorm(), 1e-9 * x.squaredNorm());
  const dct::Block combo = 2.5 * x - 0.5 * z;
  EXPECT_LT((dct::forward(combo) - (2.5 * y - 0.5 * dct::forward(z))).cwiseAbs().maxCoeff(), 1e-9);
  // Orthonormal basis.
  EXPECT_LT((dct::basis() * dct::basis().transpose() - dct::Block::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dct, ConstantBlockHasOnlyDc) {
  const dct::Block x = dct::Block::Constant(100.0);
  const auto y = dct::forward(x);
  EXPECT_NEAR(y(0, 0), 800.0, 1e-9);
  EXPECT_NEAR(y.cwiseAbs().sum() - std::abs(y(0, 0)), 0.0, 1e-9);
}

TEST(Dct, ReconstructionQuality) {
  Rng rng(4);
  SyntheticImageStyle style;
  const auto img = synthetic_image(64, 64, style, rng);
  const auto coeff = dct::transform_image(img);
  const double psnr = dct::quality_psnr(img, coeff);
  EXPECT_GT(psnr, 25.0);
  EXPECT_LT(psnr, 60.0);
  Eigen::MatrixXd broken = coeff;
  broken(0, 0) = std::nan("");
  broken(9, 9) = 1e30;
  EXPECT_LT(dct::quality_psnr(img, broken), psnr);
  const auto rec = dct::reconstruct(broken);
  EXPECT_TRUE(rec.allFinite());
  EXPECT_GE(rec.minCoeff(), 0.0);
  EXPECT_LE(rec.maxCoeff(), 255.0);
}

TEST(Blackscholes, PutCallParity) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    blackscholes::OptionParams p{rng.uniform(20, 120), rng.uniform(20, 120), rng.uniform(0.0, 0.1),
                                 rng.uniform(0.0, 0.05), rng.uniform(0.05, 0.6), rng.uniform(0.1, 3.0),
                                 blackscholes::OptionType::Call};
    const double call = blackscholes::price(p);
    p.type = blackscholes::OptionType::Put;
    const double put = blackscholes::price(p);
    const double parity = p.spot * std::exp(-p.dividend * p.maturity) - p.strike * std::exp(-p.rate * p.maturity);
    // The normal CDF approximation bounds the error.
    EXPECT_NEAR(call - put, parity, 1e-5 * (p.spot + p.strike));
    EXPECT_GE(call, -1e-9);
    EXPECT_GE(put, -1e-9);
  }
}

TEST(Blackscholes, Monotonicity) {
  blackscholes::OptionParams p{100, 100, 0.05, 0.0, 0.2, 1.0, blackscholes::OptionType::Call};
  double prev = -1.0;
  for (double s = 50; s <= 150; s += 5) {
    p.spot = s;
    const double c = blackscholes::price(p);
    EXPECT_GT(c, prev);
    prev = c;
  }
  p.spot = 100;
  prev = -1.0;
  for (double v = 0.05; v <= 1.0; v += 0.05) {
    p.volatility = v;
    const double c = blackscholes::price(p);
    EXPECT_GT(c, prev);
    prev = c;
  }
  // Reference value for the textbook at-the-money call.
  p.volatility = 0.2;
  EXPECT_NEAR(blackscholes::price(p), 10.4506, 1e-3);
  p.spot = -1;
  EXPECT_THROW(blackscholes::price(p), std::invalid_argument);
}

TEST(Blackscholes, CndfSymmetryAndAccuracy) {
  for (double x = -6; x <= 6; x += 0.25) {
    EXPECT_NEAR(blackscholes::cndf(x) + blackscholes::cndf(-x), 1.0, 1e-15);
    EXPECT_NEAR(blackscholes::cndf(x), 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-7);
  }
}

TEST(InverseK2j, ForwardRoundTrip) {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const inversek2j::Angles a{rng.uniform(0.0, kPi / 2), rng.uniform(0.1, 3.0)};
    const auto p = inversek2j::forward(a);
    ASSERT_TRUE(inversek2j::reachable(p));
    const auto s = inversek2j::solve(p);
    const auto q = inversek2j::forward(s);
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
    EXPECT_NEAR(s.theta2, a.theta2, 1e-6);
  }
}

TEST(InverseK2j, SpecialTargets) {
  const auto straight = inversek2j::solve({1.0, 0.0});
  EXPECT_NEAR(straight.theta1, 0.0, 1e-9);
  EXPECT_NEAR(straight.theta2, 0.0, 1e-9);
  const auto up = inversek2j::solve({0.0, 1.0});
  EXPECT_NEAR(up.theta1, kPi / 2, 1e-9);
  const auto right_angle = inversek2j::solve({0.5, 0.5});
  EXPECT_NEAR(right_angle.theta2, kPi / 2, 1e-9);
  EXPECT_FALSE(inversek2j::reachable({1.5, 0.0}));
  EXPECT_THROW(inversek2j::solve({1.5, 0.0}), std::invalid_argument);
}

TEST(Sobel, HandExample) {
  sobel::Strip s(3, 4);
  s << 0, 0, 10, 10,
       0, 0, 10, 10,
       0, 0, 10, 10;
  const auto out = sobel::row(s);
  ASSERT_EQ(out.size(), 2);
  // Gx = (10 - 0) * (1 + 2 + 1) = 40 at both interior columns; Gy = 0.
  EXPECT_DOUBLE_EQ(out(0), 40.0);
  EXPECT_DOUBLE_EQ(out(1), 40.0);
  sobel::Strip flat = sobel::Strip::Constant(3, 5, 7.0);
  EXPECT_DOUBLE_EQ(sobel::row(flat).cwiseAbs().maxCoeff(), 0.0);
  sobel::Strip steep(3, 3);
  steep << 0, 0, 255, 0, 0, 255, 255, 255, 255;
  EXPECT_DOUBLE_EQ(sobel::row(steep)(0), 255.0);
  EXPECT_THROW(sobel::row(sobel::Strip::Zero(3, 2)), std::invalid_argument);
}

TEST(Pgm, RoundTripAndErrors) {
  const auto dir = fs::temp_directory_path() / "sdc_pgm_test";
  fs::create_directories(dir);
  Rng rng(7);
  const auto img = synthetic_image(24, 16, SyntheticImageStyle{}, rng);
  EXPECT_EQ(img.rows(), 16);
  EXPECT_EQ(img.cols(), 24);
  write_pgm(dir / "a.pgm", img);
  const auto back = read_pgm(dir / "a.pgm");
  EXPECT_EQ(back, img);

  {
    std::ofstream f(dir / "bad.pgm", std::ios::binary);
    f << "P2\n2 2\n255\n0 0 0 0\n";
  }
  EXPECT_THROW(read_pgm(dir / "bad.pgm"), ValidationError);
  {
    std::ofstream f(dir / "short.pgm", std::ios::binary);
    f << "P5\n4 4\n255\n" << std::string(3, '\0');
  }
  EXPECT_THROW(read_pgm(dir / "short.pgm"), ValidationError);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), ValidationError);
  fs::remove_all(dir);
}

TEST(Benchmarks, NamesAndFeatureDimensions) {
  EXPECT_EQ(benchmark_names().size(), 4u);
  const std::pair<const char*, Index> dims[] = {{"dct", 10}, {"blackscholes", 8}, {"sobel", 16}, {"inversek2j", 4}};
  for (const auto& [name, n] : dims) {
    const auto b = make_benchmark(name);
    EXPECT_EQ(b->name(), name);
    EXPECT_EQ(b->kind().feature_dim, n);
    EXPECT_EQ(b->kind().feature_names.size(), static_cast<std::size_t>(n));
    for (auto i : b->perturbable_indices()) {
      EXPECT_GE(i, 0);
      EXPECT_LT(i, n);
    }
  }
  EXPECT_THROW(make_benchmark("fft"), ValidationError);
}

TEST(Benchmarks, TaskCosts) {
  EXPECT_DOUBLE_EQ(dct::kTaskCost, 384.0);
  EXPECT_DOUBLE_EQ(blackscholes::kTaskCost, 179.0);
  EXPECT_DOUBLE_EQ(sobel::kTaskCost, 288.0);
  EXPECT_DOUBLE_EQ(inversek2j::kTaskCost, 111.0);
}

TEST(Benchmarks, GeneratorsProduceWellFormedTasks) {
  InputSpec spec;
  spec.count = 300;
  spec.image_size = 64;
  for (const auto& name : benchmark_names()) {
    const auto b = make_benchmark(name);
    Rng rng(8);
    const auto w = b->generate_inputs(RangeProfile::Train, spec, rng);
    ASSERT_FALSE(w.inputs.empty()) << name;
    for (std::size_t i = 0; i < std::min<std::size_t>(w.inputs.size(), 50); ++i) {
      const auto out = b->kind().run(w.inputs[i]);
      EXPECT_EQ(static_cast<Index>(out.size()), b->kind().output_len);
      const auto fv = b->kind().feature_of(w.inputs[i], out);
      EXPECT_EQ(fv.size(), b->kind().feature_dim);
      EXPECT_TRUE(fv.allFinite());
      EXPECT_GT(b->kind().cycle_cost(w.inputs[i]), 0.0);
    }
    const auto reliable = run_reliably(b->kind(), w.inputs);
    const auto q = b->quality(w, reliable, reliable);
    EXPECT_EQ(q.value, q.baseline_value) << name;
  }
}

TEST(Benchmarks, ImageTaskCounts) {
  InputSpec spec;
  spec.image_size = 64;
  Rng rng(9);
  const auto dct_w = make_benchmark("dct")->generate_inputs(RangeProfile::Train, spec, rng);
  EXPECT_EQ(dct_w.inputs.size(), 64u * 8u);  // 64 blocks, 8 tasks each
  const auto sobel_w = make_benchmark("sobel")->generate_inputs(RangeProfile::Train, spec, rng);
  EXPECT_EQ(sobel_w.inputs.size(), 64u * 4u);  // 64 rows, 4 tiles each
}

TEST(Benchmarks, DisjointTrainAndValidationRanges) {
  InputSpec spec;
  spec.count = 2000;
  Rng rng(10);
  const auto bs = make_benchmark("blackscholes");
  for (const auto& in : bs->generate_inputs(RangeProfile::Train, spec, rng).inputs) {
    EXPECT_GE(in[0], 20.0);
    EXPECT_LT(in[0], 100.0);
  }
  for (const auto& in : bs->generate_inputs(RangeProfile::Validation, spec, rng).inputs) {
    EXPECT_GE(in[0], 100.0);
    EXPECT_LT(in[0], 120.0);
  }
  const auto ik = make_benchmark("inversek2j");
  for (const auto& in : ik->generate_inputs(RangeProfile::Train, spec, rng).inputs) {
    const auto out = ik->kind().run(in);
    const double t2 = out[1];
    EXPECT_TRUE((t2 > 0.1 - 1e-4 && t2 < 1.5 + 1e-4) || (t2 > 2.0 - 1e-4 && t2 < 3.0 + 1e-4)) << t2;
  }
  for (const auto& in : ik->generate_inputs(RangeProfile::Validation, spec, rng).inputs) {
    const double t2 = ik->kind().run(in)[1];
    EXPECT_GT(t2, 1.5 - 1e-4);
    EXPECT_LT(t2, 2.0 + 1e-4);
  }
}

TEST(Benchmarks, DctSubBlockZeroIsAlwaysReliable) {
  InputSpec spec;
  spec.image_size = 16;
  Rng rng(11);
  const auto b = make_benchmark("dct");
  const auto w = b->generate_inputs(RangeProfile::Train, spec, rng);
  int pinned = 0;
  for (const auto& in : w.inputs) pinned += b->kind().always_reliable(in);
  EXPECT_EQ(pinned, 4);
}

}  // namespace
}  // namespace sdc
