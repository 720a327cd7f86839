#include "sdc/manifest.hpp"
#include "sdc/model_io.hpp"
#include "sdc/report_io.hpp"
#include "sdc/util.hpp"
#include "sdc/arch.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

namespace sdc {
namespace {

namespace fs = std::filesystem;

DetectorModel random_model(const std::string& arch, Index n, std::uint64_t seed) {
  DetectorModel m;
  ArchitectureSpec spec{arch, n, {}};
  std::stringstream ss(arch);
  std::vector<Index> widths;
  for (std::string w; std::getline(ss, w, ',');) widths.push_back(std::stoi(w));
  spec.hidden_sizes.assign(widths.begin() + 1, widths.end() - 1);
  m.net = Mlp<float>(spec.layers());
  Rng rng(seed);
  initialize_weights(m.net, rng);
  for (auto& p : m.net.params())
    for (Index i = 0; i < p.bias.size(); ++i) p.bias(i) = static_cast<float>(rng.normal());
  m.feature_mean = Vector<float>::Zero(n);
  m.feature_std = Vector<float>::Ones(n);
  for (Index i = 0; i < n; ++i) {
    m.feature_mean(i) = static_cast<float>(rng.normal() * 100.0);
    m.feature_std(i) = static_cast<float>(rng.uniform(0.001, 50.0));
  }
  m.metadata.task_kind = "dct";
  m.metadata.feature_dim = n;
  m.metadata.architecture = arch;
  m.metadata.training_seed = 0xfeedbeefcafeULL;
  m.metadata.best_test_loss = 0.123456789;
  m.metadata.epochs = 77;
  return m;
}

std::string expect_validation_error(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ValidationError";
  return {};
}

TEST(ModelIo, BitIdenticalRoundTrip) {
  for (const std::string arch : {"10,8,2", "10,16,8,2", "10,2"}) {
    const auto m = random_model(arch, 10, 3);
    const auto text = serialize_model(m);
    const auto back = parse_model(text);
    EXPECT_EQ(serialize_model(back), text);
    ASSERT_EQ(back.net.layers(), m.net.layers());
    for (std::size_t l = 0; l < m.net.params().size(); ++l) {
      const auto& a = m.net.params()[l];
      const auto& b = back.net.params()[l];
      for (Index i = 0; i < a.weights.size(); ++i)
        EXPECT_EQ(std::bit_cast<std::uint32_t>(a.weights.data()[i]), std::bit_cast<std::uint32_t>(b.weights.data()[i]));
      for (Index i = 0; i < a.bias.size(); ++i)
        EXPECT_EQ(std::bit_cast<std::uint32_t>(a.bias(i)), std::bit_cast<std::uint32_t>(b.bias(i)));
    }
    EXPECT_TRUE(back.feature_mean.cwiseEqual(m.feature_mean).all());
    EXPECT_TRUE(back.feature_std.cwiseEqual(m.feature_std).all());
    EXPECT_EQ(back.metadata.training_seed, m.metadata.training_seed);
    EXPECT_EQ(back.metadata.best_test_loss, m.metadata.best_test_loss);
    EXPECT_EQ(back.metadata.architecture, arch);
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
      FeatureVector fv(10);
      for (Index i = 0; i < 10; ++i) fv(i) = static_cast<float>(rng.normal() * 100.0);
      EXPECT_TRUE(forward(m, fv).cwiseEqual(forward(back, fv)).all());
    }
  }
}

TEST(ModelIo, FileRoundTripAndName) {
  const auto dir = fs::temp_directory_path() / "sdc_model_io";
  fs::create_directories(dir);
  const auto m = random_model("10,4,2", 10, 5);
  const auto path = dir / model_filename("10,4,2");
  EXPECT_EQ(path.filename().string(), "model_10,4,2.json");
  save_model(path, m);
  EXPECT_EQ(serialize_model(load_model(path)), serialize_model(m));
  EXPECT_THROW(load_model(dir / "missing.json"), ValidationError);
  fs::remove_all(dir);
}

TEST(ModelIo, RejectsVersionMismatchAndMalformed) {
  const auto m = random_model("10,4,2", 10, 6);
  auto text = serialize_model(m);
  const auto pos = text.find("\"format_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  auto wrong = text;
  wrong.replace(pos, 19, "\"format_version\": 2");
  const auto msg = expect_validation_error([&] { parse_model(wrong); });
  EXPECT_NE(msg.find("format_version"), std::string::npos);
  EXPECT_THROW(parse_model("{"), ValidationError);
  EXPECT_THROW(parse_model("[]"), ValidationError);
  EXPECT_THROW(parse_model(R"({"format_version": 1})"), ValidationError);
}

TEST(Manifest, DefaultsAndRoundTrip) {
  const auto empty = parse_manifest("{}");
  EXPECT_EQ(empty, ExperimentManifest{});
  ExperimentManifest m;
  m.benchmark = "blackscholes";
  m.seed = 42;
  m.inputs.count = 1234;
  m.fault_model.rate_per_cycle = 3e-6;
  m.fault_model.max_bits_per_fault = 4;
  m.policy.detector = "ann:8,4,2";
  m.policy.batch_size = 16;
  m.train.learning_rate = 0.005;
  m.perturbation.perturbable_indices = {7};
  m.epsilon = 0.5;
  const auto text = serialize_manifest(m);
  const auto back = parse_manifest(text);
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_manifest(back), text);
  EXPECT_EQ(manifest_hash(back), manifest_hash(m));
  EXPECT_EQ(manifest_hash(m).size(), 16u);
  m.seed = 43;
  EXPECT_NE(manifest_hash(back), manifest_hash(m));
}

TEST(Manifest, ErrorsNameTheField) {
  auto msg = expect_validation_error([] { parse_manifest(R"({"fault_model": {"rate_per_cycle": "fast"}})"); });
  EXPECT_NE(msg.find("fault_model.rate_per_cycle"), std::string::npos) << msg;
  msg = expect_validation_error([] { parse_manifest(R"({"policy": {"detecter": "oracle"}})"); });
  EXPECT_NE(msg.find("detecter"), std::string::npos) << msg;
  msg = expect_validation_error([] { parse_manifest(R"({"benchmark": "fft"})"); });
  EXPECT_NE(msg.find("benchmark"), std::string::npos) << msg;
  msg = expect_validation_error([] { parse_manifest(R"({"policy": {"batch_size": 0}})"); });
  EXPECT_NE(msg.find("batch_size"), std::string::npos) << msg;
  msg = expect_validation_error([] { parse_manifest(R"({"policy": {"detector": "magic"}})"); });
  EXPECT_NE(msg.find("detector"), std::string::npos) << msg;
  msg = expect_validation_error([] { parse_manifest(R"({"perturbation": {"strategy_weights": [1, 0]}})"); });
  EXPECT_NE(msg.find("strategy_weights"), std::string::npos) << msg;
  EXPECT_THROW(parse_manifest("not json"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"format_version": 9})"), ValidationError);
  EXPECT_THROW(load_manifest("/nonexistent/manifest.json"), ValidationError);
}

TEST(Manifest, PolicyNames) {
  for (const char* ok : {"none", "oracle", "baseline", "ann:10,8,2"}) EXPECT_NO_THROW(validate_policy_name(ok));
  for (const char* bad : {"", "ann:", "ANN:10,2", "oracles"}) EXPECT_THROW(validate_policy_name(bad), ValidationError);
}

EvaluationReport sample_report(std::string detector, double eeop) {
  EvaluationReport r;
  r.benchmark = "dct";
  r.detector = std::move(detector);
  r.counts = {5, 2, 90, 3};
  r.score.tpr = 5.0 / 8.0;
  r.score.fpr = 2.0 / 92.0;
  r.score.tnr = 90.0 / 92.0;
  r.score.fnr = 3.0 / 8.0;
  r.score.mre = 0.25;
  r.score.ee = 0.09375;
  r.score.overhead = 0.2;
  r.score.eeop = eeop;
  r.quality = {QualityKind::PsnrDb, 35.5, 35.6};
  r.speedup = 1.8;
  r.cycles = {1000, 900, 100, 50, 150};
  r.faulted_tasks = 8;
  r.tasks = 100;
  r.manifest_hash = "0123456789abcdef";
  return r;
}

TEST(ReportIo, JsonRoundTripWithInfinities) {
  auto r = sample_report("ann:10,8,2", std::numeric_limits<double>::infinity());
  r.score.mre = std::numeric_limits<double>::infinity();
  r.score.tpr.reset();
  r.quality.baseline_value = std::numeric_limits<double>::infinity();
  const auto text = report_json(r);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
  const auto back = parse_report(text);
  EXPECT_EQ(report_json(back), text);
  EXPECT_TRUE(std::isinf(back.score.eeop));
  EXPECT_FALSE(back.score.tpr.has_value());
  EXPECT_EQ(back.counts, r.counts);
  EXPECT_EQ(back.detector, r.detector);
}

TEST(ReportIo, SummaryCsvQuotesAndBlanks) {
  auto a = sample_report("ann:10,8,2", 0.01);
  auto b = sample_report("none", std::numeric_limits<double>::infinity());
  b.score.tpr.reset();
  const std::vector<EvaluationReport> reps{a, b};
  const auto csv = summary_csv(reps);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSummaryHeader);
  EXPECT_NE(csv.find("\"ann:10,8,2\""), std::string::npos);
  const auto none_row = csv.substr(csv.find("dct,none"));
  EXPECT_EQ(none_row.substr(0, 10), "dct,none,,");
  EXPECT_NE(none_row.find(",inf,"), std::string::npos);
}

TEST(ReportIo, MarkdownSortedByEeop) {
  auto fit = sample_report("ann:10,4,2", 0.01);
  fit.fittest = true;
  const std::vector<EvaluationReport> reps{sample_report("ann:10,8,2", 0.5), fit,
                                           sample_report("none", std::numeric_limits<double>::infinity())};
  const auto md = summary_markdown(reps);
  const auto p_fit = md.find("ann:10,4,2");
  const auto p_mid = md.find("ann:10,8,2");
  const auto p_none = md.find("none");
  EXPECT_LT(p_fit, p_mid);
  EXPECT_LT(p_mid, p_none);
  EXPECT_NE(md.find("(fittest)"), std::string::npos);
}

TEST(ProfileIo, CsvRoundTripBitExact) {
  ProfileDataset p;
  p.task_kind = "toy";
  p.feature_dim = 3;
  p.dimension_names = {"a", "b", "c"};
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    FeatureVector v(3);
    v << static_cast<float>(rng.normal() * 1e6), static_cast<float>(rng.normal() * 1e-6), static_cast<float>(i);
    p.vectors.push_back(v);
  }
  const auto back = parse_profile_csv(profile_csv(p), "toy");
  EXPECT_EQ(back.dimension_names, p.dimension_names);
  ASSERT_EQ(back.vectors.size(), p.vectors.size());
  for (std::size_t i = 0; i < p.vectors.size(); ++i) EXPECT_TRUE(back.vectors[i].cwiseEqual(p.vectors[i]).all());

  const auto dir = fs::temp_directory_path() / "sdc_profile_io";
  fs::create_directories(dir);
  save_profile(dir / "profile.csv", p, 99, 4);
  EXPECT_TRUE(fs::exists(dir / "profile.json"));
  ProfileSidecar side;
  const auto loaded = load_profile(dir / "profile.csv", &side);
  EXPECT_EQ(side.rows, 50u);
  EXPECT_EQ(side.seed, 99u);
  EXPECT_EQ(side.batch_size, 4);
  EXPECT_EQ(side.task_kind, "toy");
  EXPECT_EQ(loaded.vectors.size(), 50u);
  fs::remove_all(dir);

  EXPECT_THROW(parse_profile_csv("a,b\n1,2,3\n", "toy"), ValidationError);
  EXPECT_THROW(parse_profile_csv("a,b\n1,x\n", "toy"), ValidationError);
}

TEST(TrainingLog, Csv) {
  const std::vector<TrainingLogEntry> log{{1, 0.5, 0.6, 98}, {2, 0.4, 0.45, 99}};
  const auto csv = training_log_csv(log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,test_loss,tickets");
  EXPECT_NE(csv.find("\n2,"), std::string::npos);
}

TEST(Trace, OneLinePerRecord) {
  std::vector<TaskRecord> recs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    recs[i].task_index = i;
    recs[i].reliable_output = {1.0f};
    recs[i].observed_output = {std::numeric_limits<float>::infinity()};
  }
  const auto nd = trace_ndjson(recs, true);
  EXPECT_EQ(std::count(nd.begin(), nd.end(), '\n'), 3);
  EXPECT_NE(nd.find("\"inf\""), std::string::npos);
  EXPECT_EQ(trace_ndjson(recs, false).find("observed"), std::string::npos);
}

TEST(RealFormat, InfAndNan) {
  EXPECT_EQ(format_real(std::numeric_limits<float>::infinity()), "inf");
  EXPECT_EQ(format_real(-std::numeric_limits<float>::infinity()), "-inf");
  EXPECT_EQ(format_real(std::nanf("")), "nan");
  EXPECT_TRUE(std::isinf(parse_real("inf")));
  EXPECT_TRUE(std::isnan(parse_real("nan")));
  EXPECT_FLOAT_EQ(static_cast<float>(parse_real(format_real(0.1f))), 0.1f);
  EXPECT_THROW(parse_real("1.0abc"), ValidationError);
}

}  // namespace
}  // namespace sdc
