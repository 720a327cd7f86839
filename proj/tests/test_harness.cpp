#include "sdc/harness.hpp"
#include "sdc/perf_model.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

namespace sdc {
namespace {

TaskKind toy_kind(double cost = 100.0) {
  TaskKind k;
  k.name = "toy";
  k.feature_dim = 4;
  k.output_len = 2;
  k.feature_names = {"a", "b", "sum", "product"};
  k.run = [](std::span<const double> in) {
    return TaskOutput{static_cast<float>(in[0] + in[1]), static_cast<float>(in[0] * in[1])};
  };
  k.feature_of = [](std::span<const double> in, std::span<const float> out) {
    FeatureVector fv(4);
    fv << static_cast<float>(in[0]), static_cast<float>(in[1]), out[0], out[1];
    return fv;
  };
  k.cycle_cost = [cost](std::span<const double>) { return cost; };
  return k;
}

std::vector<TaskInput> toy_inputs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TaskInput> in;
  for (std::size_t i = 0; i < n; ++i) in.push_back({rng.uniform(1.0, 10.0), rng.uniform(1.0, 10.0)});
  return in;
}

bool bitwise_equal(const TaskOutput& a, const TaskOutput& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
  return true;
}

// Two-class model whose Incorrect score always wins.
std::shared_ptr<const DetectorModel> always_incorrect(Index n) {
  auto m = std::make_shared<DetectorModel>();
  m->net = Mlp<float>({{LayerKind::InnerProduct, n, 2}});
  m->net.params()[0].bias << 0.0f, 1.0f;
  m->feature_mean = Vector<float>::Zero(n);
  m->feature_std = Vector<float>::Ones(n);
  m->metadata.architecture = std::to_string(n) + ",2";
  return m;
}

ExecutionPolicy policy_of(Detector d, Index batch = 1, Index gang = 64) {
  ExecutionPolicy p;
  p.detector = std::move(d);
  p.batch_size = batch;
  p.gang_size = gang;
  return p;
}

TEST(Poisson, MeanAndZeroMassMatchTheory) {
  Rng rng(1);
  for (double lambda : {0.1, 1.0, 5.0, 100.0}) {
    const int n = 200000;
    double sum = 0.0;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
      const auto k = rng.poisson(lambda);
      sum += static_cast<double>(k);
      zeros += k == 0;
    }
    EXPECT_NEAR(sum / n, lambda, 5.0 * std::sqrt(lambda / n));
    if (lambda <= 5.0) EXPECT_NEAR(static_cast<double>(zeros) / n, std::exp(-lambda), 0.005);
  }
}

TEST(InjectFaults, ZeroRateLeavesOutputUntouched) {
  Rng rng(2);
  FaultModel f;
  f.rate_per_cycle = 0.0;
  const TaskOutput out{1.5f, -2.0f};
  const auto r = inject_faults(out, 1e9, f, rng);
  EXPECT_FALSE(r.faulted);
  EXPECT_EQ(r.fault_count, 0u);
  EXPECT_TRUE(bitwise_equal(r.output, out));
}

TEST(InjectFaults, CertainFaultOnSingleElement) {
  FaultModel f;
  f.rate_per_cycle = 1.0;
  int faulted = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng = Rng::stream(3, i);
    faulted += inject_faults({3.25f}, 100.0, f, rng).faulted;
  }
  // About 100 faults per draw; only flips that cancel exactly could hide them.
  EXPECT_GE(faulted, 990);
}

TEST(InjectFaults, FaultedMeansBitwiseDifferent) {
  FaultModel f;
  f.rate_per_cycle = 0.01;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    Rng rng = Rng::stream(4, i);
    const TaskOutput ref{1.0f, 2.0f, 3.0f};
    const auto r = inject_faults(ref, 50.0, f, rng);
    EXPECT_EQ(r.faulted, !bitwise_equal(r.output, ref));
    if (r.fault_count == 0) EXPECT_FALSE(r.faulted);
  }
}

TEST(InjectFaults, CalibratedPerTaskFaultFrequency) {
  FaultModel f;
  f.rate_per_cycle = 1e-7;
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(5, static_cast<std::uint64_t>(i));
    hits += inject_faults({1.0f, 2.0f}, 1e7, f, rng).fault_count > 0;
  }
  EXPECT_NEAR(static_cast<double>(hits) / n, 1.0 - std::exp(-1.0), 0.01);
}

TEST(FaultModel, Validation) {
  FaultModel f;
  EXPECT_NO_THROW(f.validate());
  f.rate_per_cycle = -1e-9;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f.rate_per_cycle = 1e-7;
  f.max_bits_per_fault = 0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(BatchAggregate, MeanPreservesDimension) {
  FeatureVector a(2), b(2);
  a << 0.0f, 2.0f;
  b << 2.0f, 0.0f;
  const std::vector<FeatureVector> ab{a, b}, ba{b, a}, one{a};
  const auto m = batch_aggregate(ab);
  EXPECT_FLOAT_EQ(m(0), 1.0f);
  EXPECT_FLOAT_EQ(m(1), 1.0f);
  EXPECT_TRUE(batch_aggregate(ba).cwiseEqual(m).all());
  EXPECT_TRUE(batch_aggregate(one).cwiseEqual(a).all());
  const std::vector<FeatureVector> same(5, a);
  EXPECT_TRUE(batch_aggregate(same).cwiseEqual(a).all());
  EXPECT_THROW(batch_aggregate({}), std::invalid_argument);
}

TEST(Detect, PolicyVerdicts) {
  const std::vector<FeatureVector> batch{FeatureVector::Ones(4), FeatureVector::Ones(4)};
  const bool clean[2] = {false, false};
  const bool dirty[2] = {false, true};
  auto oracle = policy_of(OracleDetector{});
  EXPECT_EQ(detect(oracle, batch, clean), Verdict::Correct);
  EXPECT_EQ(detect(oracle, batch, dirty), Verdict::Incorrect);
  auto none = policy_of(NoDetector{});
  EXPECT_EQ(detect(none, batch, dirty), Verdict::Correct);
  auto ann = policy_of(always_incorrect(4));
  EXPECT_EQ(detect(ann, batch, clean), Verdict::Incorrect);
  const std::vector<FeatureVector> mixed{FeatureVector::Ones(4), FeatureVector::Ones(3)};
  EXPECT_THROW(detect(ann, mixed, clean), std::invalid_argument);
  auto wrong = policy_of(always_incorrect(5));
  EXPECT_THROW(detect(wrong, batch, clean), std::invalid_argument);
  EXPECT_THROW(detect(none, {}, {}), std::invalid_argument);
}

TEST(ZScoreBaseline, WarmsUpThenFlagsOutliers) {
  ZScoreBaseline z(4.0, 100);
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    FeatureVector v(2);
    v << static_cast<float>(rng.normal()), static_cast<float>(rng.normal());
    EXPECT_EQ(z.check(v), Verdict::Correct);
  }
  FeatureVector outlier(2);
  outlier << 0.0f, 50.0f;
  EXPECT_EQ(z.check(outlier), Verdict::Incorrect);
  EXPECT_EQ(z.samples(), 100u);  // rejected vectors do not update statistics
  FeatureVector typical(2);
  typical << 0.1f, -0.2f;
  EXPECT_EQ(z.check(typical), Verdict::Correct);
  FeatureVector nan(2);
  nan << std::nanf(""), 0.0f;
  EXPECT_EQ(z.check(nan), Verdict::Incorrect);
  EXPECT_DOUBLE_EQ(ZScoreBaseline::cost(10), 90.0);
}

TEST(ExecutionPolicy, Validation) {
  EXPECT_NO_THROW(policy_of(NoDetector{}, 4, 8).validate());
  EXPECT_THROW(policy_of(NoDetector{}, 16, 8).validate(), std::invalid_argument);
  EXPECT_THROW(policy_of(NoDetector{}, 0, 8).validate(), std::invalid_argument);
  EXPECT_THROW(policy_of(std::shared_ptr<const DetectorModel>{}).validate(), std::invalid_argument);
}

TEST(ExecuteGang, OracleRecoversReliableOutputsExactly) {
  const auto kind = toy_kind(1e5);
  const auto inputs = toy_inputs(500, 7);
  FaultModel f;
  f.rate_per_cycle = 1e-6;
  f.rng_seed = 99;
  auto p = policy_of(OracleDetector{}, 1, 500);
  const auto run = execute_gang(kind, inputs, 0, p, f);
  int faulted = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_TRUE(bitwise_equal(run.outputs[i], kind.run(inputs[i])));
    faulted += run.records[i].faulted;
    EXPECT_EQ(run.records[i].reexecuted, run.records[i].faulted);
    EXPECT_EQ(run.records[i].cycles_detect, 0.0);
  }
  EXPECT_GT(faulted, 0);
}

TEST(ExecuteGang, NoDetectorAtZeroRateCostsNothing) {
  const auto kind = toy_kind();
  const auto inputs = toy_inputs(50, 8);
  FaultModel f;
  f.rate_per_cycle = 0.0;
  auto p = policy_of(NoDetector{}, 1, 64);
  const auto run = execute_gang(kind, inputs, 0, p, f);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_TRUE(bitwise_equal(run.outputs[i], kind.run(inputs[i])));
    EXPECT_EQ(run.records[i].cycles_detect, 0.0);
    EXPECT_EQ(run.records[i].cycles_correct, 0.0);
    EXPECT_FALSE(run.records[i].reexecuted);
  }
  EXPECT_EQ(overhead(run.records, cycle_totals(run.records).reliable), 0.0);
}

TEST(ExecuteGang, AlwaysFlaggingDetectorLedger) {
  const auto kind = toy_kind(100.0);
  const auto inputs = toy_inputs(10, 9);
  FaultModel f;
  auto model = always_incorrect(4);
  auto p = policy_of(model, 1, 10);
  const auto run = execute_gang(kind, inputs, 0, p, f);
  double task = 0.0, detect_total = 0.0;
  for (const auto& r : run.records) {
    EXPECT_TRUE(r.reexecuted);
    EXPECT_EQ(r.detector_verdict, Verdict::Incorrect);
    task += r.cycles_task;
    detect_total += r.cycles_detect;
  }
  // 10 tasks of 100 cycles; each check is a 4x2 layer: 8 MACs at 2 ops.
  EXPECT_DOUBLE_EQ(task, 1000.0);
  EXPECT_DOUBLE_EQ(detect_total, 10 * 16.0);
  EXPECT_DOUBLE_EQ(overhead(run.records, task), (detect_total + task) / task);
}

TEST(ExecuteGang, BatchedFlagReexecutesWholeUnit) {
  const auto kind = toy_kind();
  const auto inputs = toy_inputs(37, 10);
  FaultModel f;
  auto p = policy_of(always_incorrect(4), 8, 64);
  const auto run = execute_gang(kind, inputs, 0, p, f);
  ASSERT_EQ(run.units.size(), 5u);  // 8+8+8+8+5
  EXPECT_EQ(run.units.back().tasks.size(), 5u);
  for (const auto& r : run.records) EXPECT_TRUE(r.reexecuted);
  // A unit's detection cost: one check plus forming the mean of its vectors.
  EXPECT_DOUBLE_EQ(run.units[0].cycles_detect, 16.0 + 8 * 4);
}

TEST(ExecuteGang, AlwaysReliableTasksAreUnchecked) {
  auto kind = toy_kind(1e6);
  kind.always_reliable = [](std::span<const double> in) { return in[0] < 5.0; };
  const auto inputs = toy_inputs(200, 11);
  FaultModel f;
  f.rate_per_cycle = 1e-6;
  auto p = policy_of(NoDetector{}, 1, 256);
  const auto run = execute_gang(kind, inputs, 0, p, f);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& r = run.records[i];
    if (inputs[i][0] < 5.0) {
      EXPECT_TRUE(r.always_reliable);
      EXPECT_FALSE(r.faulted);
      EXPECT_EQ(r.detector_verdict, Verdict::NotChecked);
      EXPECT_EQ(r.unit_index, -1);
    } else {
      EXPECT_GE(r.unit_index, 0);
    }
  }
}

TEST(ExecuteWorkload, InvariantsAcrossDetectors) {
  const auto kind = toy_kind(2e4);
  const auto inputs = toy_inputs(3000, 12);
  FaultModel f;
  f.rate_per_cycle = 2e-6;
  f.rng_seed = 1234;

  auto none = policy_of(NoDetector{}, 1, 256);
  const auto base = execute_workload(kind, inputs, none, f);
  std::set<std::size_t> none_mismatch;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (!bitwise_equal(base.outputs[i], base.records[i].reliable_output)) none_mismatch.insert(i);
  ASSERT_FALSE(none_mismatch.empty());

  std::vector<ExecutionPolicy> policies;
  policies.push_back(policy_of(OracleDetector{}, 1, 256));
  policies.push_back(policy_of(ZScoreBaseline{4.0, 64}, 1, 256));
  policies.push_back(policy_of(always_incorrect(4), 4, 256));
  for (auto& p : policies) {
    const auto run = execute_workload(kind, inputs, p, f);
    ASSERT_EQ(run.records.size(), inputs.size());
    double ledger = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& r = run.records[i];
      EXPECT_EQ(r.task_index, i);
      // Shared fault outcome across detectors.
      EXPECT_EQ(r.faulted, base.records[i].faulted);
      EXPECT_TRUE(bitwise_equal(r.observed_output, base.records[i].observed_output));
      if (r.reexecuted) {
        EXPECT_EQ(r.detector_verdict, Verdict::Incorrect);
        EXPECT_TRUE(bitwise_equal(run.outputs[i], r.reliable_output));
      } else {
        EXPECT_EQ(r.cycles_correct, 0.0);
      }
      if (!bitwise_equal(run.outputs[i], r.reliable_output)) EXPECT_TRUE(none_mismatch.count(i));
      ledger += r.cycles_task + r.cycles_detect + r.cycles_correct;
    }
    const auto t = cycle_totals(run.records);
    EXPECT_NEAR(ledger, t.reliable + t.detect + t.correct, 1e-6 * ledger);
    for (const auto& u : run.units) {
      for (auto ti : u.tasks) EXPECT_EQ(run.records[ti].reexecuted, u.verdict == Verdict::Incorrect);
    }
  }
}

TEST(ExecuteWorkload, ScheduleIndependent) {
  const auto kind = toy_kind(5e4);
  const auto inputs = toy_inputs(1000, 13);
  FaultModel f;
  f.rate_per_cycle = 1e-6;
  f.rng_seed = 5;
  auto p1 = policy_of(OracleDetector{}, 1, 100);
  auto p4 = policy_of(OracleDetector{}, 1, 100);
  const auto a = execute_workload(kind, inputs, p1, f, {1, false});
  const auto b = execute_workload(kind, inputs, p4, f, {4, false});
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_EQ(a.records[i].faulted, b.records[i].faulted);
    EXPECT_EQ(a.records[i].fault_count, b.records[i].fault_count);
    EXPECT_TRUE(bitwise_equal(a.records[i].observed_output, b.records[i].observed_output));
  }
}

TEST(ExecuteWorkload, GangSizeDoesNotChangeFaults) {
  const auto kind = toy_kind(5e4);
  const auto inputs = toy_inputs(300, 14);
  FaultModel f;
  f.rate_per_cycle = 1e-6;
  auto small = policy_of(NoDetector{}, 1, 7);
  auto large = policy_of(NoDetector{}, 1, 300);
  const auto a = execute_workload(kind, inputs, small, f);
  const auto b = execute_workload(kind, inputs, large, f);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    EXPECT_TRUE(bitwise_equal(a.outputs[i], b.outputs[i]));
}

TEST(DetectorName, Labels) {
  EXPECT_EQ(detector_name(NoDetector{}), "none");
  EXPECT_EQ(detector_name(OracleDetector{}), "oracle");
  EXPECT_EQ(detector_name(ZScoreBaseline{}), "baseline");
  EXPECT_EQ(detector_name(always_incorrect(4)), "ann:4,2");
}

}  // namespace
}  // namespace sdc
