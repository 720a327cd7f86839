// sdc_sentinel: profile, train, evaluate, simulate, report.
//
// Exit codes: 0 success, 1 other failure, 2 validation error, 3 no viable
// detector.

#include "sdc/manifest.hpp"
#include "sdc/pipeline.hpp"
#include "sdc/util.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<long> batch_size;
  std::optional<double> fault_rate;
  std::optional<double> epsilon;
};

void add_common(CLI::App* cmd, fs::path& manifest, fs::path& out, Overrides& o) {
  cmd->add_option("--manifest", manifest, "Experiment manifest (JSON)")->required();
  cmd->add_option("--out", out, "Output directory")->default_val(".");
  cmd->add_option("--seed", o.seed, "Override the manifest seed");
  cmd->add_option("--policy", o.policy, "ann:NAME | oracle | none | baseline");
  cmd->add_option("--batch-size", o.batch_size, "Tasks per detection check");
  cmd->add_option("--fault-rate", o.fault_rate, "Faults per cycle");
  cmd->add_option("--epsilon", o.epsilon, "Overhead budget for EEOP");
}

sdc::ExperimentManifest load(const fs::path& path, const Overrides& o) {
  auto m = sdc::load_manifest(path);
  if (o.seed) m.seed = *o.seed;
  if (o.policy) m.policy.detector = *o.policy;
  if (o.batch_size) m.policy.batch_size = *o.batch_size;
  if (o.fault_rate) m.fault_model.rate_per_cycle = *o.fault_rate;
  if (o.epsilon) m.epsilon = *o.epsilon;
  m.validate();
  return m;
}

void print_report_line(const sdc::EvaluationReport& r) {
  std::cout << r.detector << ": overhead " << sdc::format_real(r.score.overhead) << ", speedup "
            << sdc::format_real(r.speedup) << ", quality " << sdc::format_real(r.quality.value)
            << (r.fittest ? " (fittest)" : "") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural silent-data-corruption detectors: profile, train, evaluate, simulate"};
  app.require_subcommand(1);

  fs::path manifest_path, out_dir, profile_path, models_dir;
  Overrides o;
  std::vector<fs::path> report_files;

  auto* profile = app.add_subcommand("profile", "Record feature vectors from reliable runs");
  add_common(profile, manifest_path, out_dir, o);

  auto* train = app.add_subcommand("train", "Train the seven detector architectures");
  add_common(train, manifest_path, out_dir, o);
  train->add_option("--profile", profile_path, "Profile CSV (default <out>/profile.csv)");

  auto* evaluate = app.add_subcommand("evaluate", "Score every detector on the validation workload");
  add_common(evaluate, manifest_path, out_dir, o);
  evaluate->add_option("--models", models_dir, "Models directory (default <out>/models)");

  auto* simulate = app.add_subcommand("simulate", "Run the validation workload under one policy and trace it");
  add_common(simulate, manifest_path, out_dir, o);
  simulate->add_option("--models", models_dir, "Models directory (default <out>/models)");

  auto* report = app.add_subcommand("report", "Render report files as Markdown and CSV tables");
  report->add_option("reports", report_files, "Report JSON files")->required();
  report->add_option("--out", out_dir, "Output directory")->default_val(".");

  CLI11_PARSE(app, argc, argv);

  try {
    if (profile->parsed()) {
      const auto path = sdc::cmd_profile(load(manifest_path, o), out_dir);
      std::cout << "wrote " << path.string() << '\n';
    } else if (train->parsed()) {
      const auto m = load(manifest_path, o);
      if (profile_path.empty()) profile_path = out_dir / "profile.csv";
      int failed = 0;
      for (const auto& r : sdc::cmd_train(m, profile_path, out_dir)) {
        if (r.result) {
          std::cout << r.arch.name << ": best test loss " << sdc::format_real(r.result->model.metadata.best_test_loss)
                    << " after " << r.result->model.metadata.epochs << " epochs\n";
        } else {
          std::cerr << r.arch.name << ": " << r.error << '\n';
          ++failed;
        }
      }
      if (failed) return 1;
    } else if (evaluate->parsed()) {
      const auto m = load(manifest_path, o);
      if (models_dir.empty()) models_dir = out_dir / "models";
      for (const auto& r : sdc::cmd_evaluate(m, models_dir, out_dir).reports) print_report_line(r);
    } else if (simulate->parsed()) {
      const auto m = load(manifest_path, o);
      if (models_dir.empty()) models_dir = out_dir / "models";
      print_report_line(sdc::cmd_simulate(m, models_dir, out_dir).report);
    } else if (report->parsed()) {
      sdc::cmd_report(report_files, out_dir);
    }
  } catch (const sdc::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sdc::NoViableDetector& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
