#include "sdc/pipeline.hpp"

#include "json_codec.hpp"
#include "sdc/model_io.hpp"
#include "sdc/report_io.hpp"
#include "sdc/util.hpp"

#include <algorithm>

namespace sdc {

namespace fs = std::filesystem;
using json_codec::Json;

namespace {

ExecutionPolicy make_policy(const ExperimentManifest& m, Detector detector) {
  ExecutionPolicy p;
  p.detector = std::move(detector);
  p.batch_size = m.policy.batch_size;
  p.gang_size = m.policy.gang_size;
  p.validate();
  return p;
}

FaultModel effective_faults(const ExperimentManifest& m) {
  FaultModel f = m.fault_model;
  f.rng_seed = seed_plan(m).faults;
  return f;
}

struct ValidationRun {
  Workload workload;
  std::vector<TaskOutput> reliable;
};

ValidationRun validation_workload(const ExperimentManifest& m, const Benchmark& bench, unsigned threads) {
  Rng rng(seed_plan(m).validation_inputs);
  ValidationRun v{bench.generate_inputs(RangeProfile::Validation, m.inputs, rng), {}};
  v.reliable = run_reliably(bench.kind(), v.workload.inputs, threads);
  return v;
}

EvaluationReport run_and_assess(const ExperimentManifest& m, const Benchmark& bench, const ValidationRun& v,
                                ExecutionPolicy policy, unsigned threads, RunResult* keep = nullptr) {
  const auto name = detector_name(policy.detector);
  RunResult run = execute_workload(bench.kind(), v.workload.inputs, policy, effective_faults(m), {threads, false});
  const auto quality = bench.quality(v.workload, run.outputs, v.reliable);
  auto rep = assess_run(bench.name(), name, run, quality, m.frequency, m.epsilon);
  rep.manifest_hash = manifest_hash(m);
  if (keep) *keep = std::move(run);
  return rep;
}

std::string file_stem_for(const std::string& detector) {
  std::string s = detector;
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

}  // namespace

SeedPlan seed_plan(const ExperimentManifest& m) {
  SeedPlan s;
  s.profile_inputs = derive_seed(m.seed, 1);
  s.validation_inputs = derive_seed(m.seed, 2);
  s.training = m.train.rng_seed != 0 ? m.train.rng_seed : derive_seed(m.seed, 3);
  s.faults = m.fault_model.rng_seed != 0 ? m.fault_model.rng_seed : derive_seed(m.seed, 4);
  return s;
}

PerturbationParams effective_perturbation(const ExperimentManifest& m, const Benchmark& bench) {
  PerturbationParams p = m.perturbation;
  if (p.perturbable_indices.empty()) p.perturbable_indices = bench.perturbable_indices();
  for (Index i : p.perturbable_indices)
    if (i < 0 || i >= bench.kind().feature_dim)
      throw ValidationError("manifest.perturbation.perturbable_indices: index " + std::to_string(i) + " out of range");
  p.max_elements = std::min<int>(p.max_elements, static_cast<int>(p.perturbable_indices.size()));
  return p;
}

ProfileDataset build_profile(const ExperimentManifest& m, unsigned threads) {
  m.validate();
  const auto bench = make_benchmark(m.benchmark);
  const auto& kind = bench->kind();
  Rng rng(seed_plan(m).profile_inputs);
  const Workload w = bench->generate_inputs(RangeProfile::Train, m.inputs, rng);

  std::vector<std::optional<FeatureVector>> features(w.inputs.size());
  parallel_for(w.inputs.size(), threads, [&](std::size_t i) {
    const auto& in = w.inputs[i];
    if (kind.always_reliable && kind.always_reliable(in)) return;
    features[i] = kind.feature_of(in, kind.run(in));
  });

  ProfileDataset p;
  p.task_kind = kind.name;
  p.feature_dim = kind.feature_dim;
  p.dimension_names = kind.feature_names;
  const auto batch = static_cast<std::size_t>(m.policy.batch_size);
  std::vector<FeatureVector> pending;
  for (auto& f : features) {
    if (!f) continue;
    pending.push_back(std::move(*f));
    if (pending.size() == batch) {
      p.vectors.push_back(batch_aggregate(pending));
      pending.clear();
    }
  }
  if (!pending.empty()) p.vectors.push_back(batch_aggregate(pending));
  return p;
}

fs::path cmd_profile(const ExperimentManifest& m, const fs::path& out_dir) {
  const auto profile = build_profile(m, worker_threads());
  const auto path = out_dir / "profile.csv";
  save_profile(path, profile, m.seed, m.policy.batch_size);
  return path;
}

std::vector<TrainingOutcome> cmd_train(const ExperimentManifest& m, const fs::path& profile_csv, const fs::path& out_dir) {
  m.validate();
  const auto bench = make_benchmark(m.benchmark);
  ProfileSidecar side;
  const auto profile = load_profile(profile_csv, &side);
  if (profile.task_kind != bench->name())
    throw ValidationError("profile task kind '" + profile.task_kind + "' does not match benchmark '" + bench->name() + "'");
  TrainConfig cfg = m.train;
  cfg.rng_seed = seed_plan(m).training;
  auto outcomes = train_all(profile, cfg, effective_perturbation(m, *bench), worker_threads());
  for (const auto& o : outcomes) {
    if (!o.result) continue;
    save_model(out_dir / "models" / model_filename(o.arch.name), o.result->model);
    write_file_atomic(out_dir / "logs" / ("train_" + o.arch.name + ".csv"), training_log_csv(o.result->log));
  }
  return outcomes;
}

std::vector<NamedModel> load_models(const fs::path& dir, const TaskKind& kind) {
  if (!fs::is_directory(dir)) throw ValidationError("models directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("model_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedModel> models;
  for (const auto& f : files) {
    auto model = std::make_shared<DetectorModel>(load_model(f));
    if (model->metadata.task_kind != kind.name || model->feature_dim() != kind.feature_dim)
      throw ValidationError(f.string() + ": model is for '" + model->metadata.task_kind + "' with N=" +
                            std::to_string(model->feature_dim()));
    models.emplace_back(model->metadata.architecture, std::move(model));
  }
  return models;
}

EvaluationSummary evaluate(const ExperimentManifest& m, const std::vector<NamedModel>& models, unsigned threads) {
  m.validate();
  const auto bench = make_benchmark(m.benchmark);
  const auto v = validation_workload(m, *bench, threads);

  EvaluationSummary s;
  for (const auto& [name, model] : models)
    s.reports.push_back(run_and_assess(m, *bench, v, make_policy(m, model), threads));
  const std::size_t ann_count = s.reports.size();
  s.reports.push_back(run_and_assess(m, *bench, v, make_policy(m, OracleDetector{}), threads));
  s.reports.push_back(run_and_assess(m, *bench, v, make_policy(m, NoDetector{}), threads));
  s.reports.push_back(run_and_assess(m, *bench, v, make_policy(m, ZScoreBaseline{}), threads));

  if (ann_count > 0) {
    try {
      const auto& best = select_fittest(std::span<const EvaluationReport>(s.reports.data(), ann_count));
      s.fittest = best.detector;
      for (auto& r : s.reports) r.fittest = r.detector == best.detector;
    } catch (const NoViableDetector&) {
    }
  }
  return s;
}

EvaluationSummary cmd_evaluate(const ExperimentManifest& m, const fs::path& models_dir, const fs::path& out_dir) {
  const auto bench = make_benchmark(m.benchmark);
  const auto models = load_models(models_dir, bench->kind());
  auto s = evaluate(m, models, worker_threads());
  for (const auto& r : s.reports)
    write_file_atomic(out_dir / "reports" / (file_stem_for(r.detector) + ".json"), report_json(r));
  write_file_atomic(out_dir / "summary.csv", summary_csv(s.reports));
  write_file_atomic(out_dir / "summary.md", summary_markdown(s.reports));
  Json doc;
  doc["benchmark"] = bench->name();
  doc["manifest_hash"] = manifest_hash(m);
  doc["epsilon"] = m.epsilon;
  doc["fittest"] = s.fittest ? Json(*s.fittest) : Json(nullptr);
  if (!s.fittest) doc["note"] = "no viable detector: every candidate exceeds the overhead budget";
  write_file_atomic(out_dir / "evaluation.json", doc.dump(2) + "\n");
  if (!s.fittest) throw NoViableDetector("no viable detector");
  return s;
}

SimulationResult simulate(const ExperimentManifest& m, const fs::path& models_dir, unsigned threads) {
  m.validate();
  const auto bench = make_benchmark(m.benchmark);
  Detector detector = NoDetector{};
  const auto& name = m.policy.detector;
  if (name == "oracle") {
    detector = OracleDetector{};
  } else if (name == "baseline") {
    detector = ZScoreBaseline{};
  } else if (name.rfind("ann:", 0) == 0) {
    const auto path = models_dir / model_filename(name.substr(4));
    auto model = std::make_shared<DetectorModel>(load_model(path));
    if (model->metadata.task_kind != bench->name())
      throw ValidationError(path.string() + ": model is for '" + model->metadata.task_kind + "'");
    detector = std::shared_ptr<const DetectorModel>(std::move(model));
  }
  const auto v = validation_workload(m, *bench, threads);
  SimulationResult out;
  out.report = run_and_assess(m, *bench, v, make_policy(m, std::move(detector)), threads, &out.run);
  return out;
}

SimulationResult cmd_simulate(const ExperimentManifest& m, const fs::path& models_dir, const fs::path& out_dir) {
  auto result = simulate(m, models_dir, worker_threads());
  write_file_atomic(out_dir / "trace.ndjson", trace_ndjson(result.run.records, false));
  write_file_atomic(out_dir / "simulation.json", report_json(result.report));
  return result;
}

void cmd_report(const std::vector<fs::path>& report_files, const fs::path& out_dir) {
  if (report_files.empty()) throw ValidationError("report: no input files");
  std::vector<EvaluationReport> reports;
  for (const auto& f : report_files) {
    if (!fs::exists(f)) throw ValidationError("report file not found: " + f.string());
    reports.push_back(load_report(f));
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.score.eeop < b.score.eeop; });
  write_file_atomic(out_dir / "report.md", summary_markdown(reports));
  write_file_atomic(out_dir / "report.csv", summary_csv(reports));
}

}  // namespace sdc
