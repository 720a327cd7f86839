#include "sdc/report_io.hpp"

#include "json_codec.hpp"
#include "sdc/util.hpp"

#include <algorithm>
#include <sstream>

namespace sdc {

using json_codec::Json;
using json_codec::Reader;

namespace {

std::string rate_field(const std::optional<double>& r) { return r ? format_real(*r) : std::string(); }

Json optional_real(const std::optional<double>& r) { return r ? json_codec::real(*r) : Json(nullptr); }

std::optional<double> read_optional(const Reader& r) {
  if (r.node().is_null()) return std::nullopt;
  return r.as_real();
}

const char* quality_kind_name(QualityKind k) { return k == QualityKind::PsnrDb ? "psnr_db" : "mean_relative_error"; }

// RFC 4180 quoting for fields holding commas or quotes (architecture names do).
std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::filesystem::path sidecar_path(std::filesystem::path csv_path) { return csv_path.replace_extension(".json"); }

Json output_json(const TaskOutput& out) {
  Json arr = Json::array();
  for (float v : out) arr.push_back(json_codec::real(static_cast<double>(v)));
  return arr;
}

}  // namespace

std::string profile_csv(const ProfileDataset& profile) {
  profile.validate();
  std::string out;
  for (std::size_t i = 0; i < profile.dimension_names.size(); ++i) {
    if (i) out += ',';
    out += profile.dimension_names[i];
  }
  out += '\n';
  for (const auto& v : profile.vectors) {
    for (Index i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_real(v(i));
    }
    out += '\n';
  }
  return out;
}

ProfileDataset parse_profile_csv(std::string_view csv, const std::string& task_kind) {
  ProfileDataset p;
  p.task_kind = task_kind;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (line_no == 1) {
      for (auto f : fields) p.dimension_names.emplace_back(f);
      p.feature_dim = static_cast<Index>(fields.size());
      continue;
    }
    if (static_cast<Index>(fields.size()) != p.feature_dim)
      throw ValidationError("profile line " + std::to_string(line_no) + ": expected " +
                            std::to_string(p.feature_dim) + " fields");
    FeatureVector v(p.feature_dim);
    for (Index i = 0; i < p.feature_dim; ++i) {
      try {
        v(i) = static_cast<float>(parse_real(fields[static_cast<std::size_t>(i)]));
      } catch (const ValidationError& e) {
        throw ValidationError("profile line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    p.vectors.push_back(std::move(v));
  }
  if (p.dimension_names.empty()) throw ValidationError("profile: missing header");
  return p;
}

void save_profile(const std::filesystem::path& csv_path, const ProfileDataset& profile, std::uint64_t seed,
                  Index batch_size) {
  Json side;
  side["format_version"] = kReportFormatVersion;
  side["task_kind"] = profile.task_kind;
  side["feature_dim"] = profile.feature_dim;
  side["rows"] = profile.vectors.size();
  side["seed"] = seed;
  side["batch_size"] = batch_size;
  write_file_atomic(csv_path, profile_csv(profile));
  write_file_atomic(sidecar_path(csv_path), side.dump(2) + "\n");
}

ProfileDataset load_profile(const std::filesystem::path& csv_path, ProfileSidecar* sidecar) {
  const auto side_text = read_file(sidecar_path(csv_path));
  const Json doc = json_codec::parse(side_text, "profile sidecar");
  const Reader r(doc, "profile");
  if (r.at("format_version").as_int() != kReportFormatVersion) r.at("format_version").fail("unsupported version");
  ProfileSidecar s;
  s.task_kind = r.at("task_kind").as_string();
  s.feature_dim = static_cast<Index>(r.at("feature_dim").as_int());
  s.rows = r.at("rows").as_uint();
  s.seed = r.at("seed").as_uint();
  r.opt("batch_size", s.batch_size);
  auto p = parse_profile_csv(read_file(csv_path), s.task_kind);
  if (p.feature_dim != s.feature_dim) throw ValidationError("profile: header width does not match sidecar feature_dim");
  if (p.vectors.size() != s.rows) throw ValidationError("profile: row count does not match sidecar");
  if (sidecar) *sidecar = s;
  return p;
}

std::string training_log_csv(std::span<const TrainingLogEntry> log) {
  std::string out = "epoch,train_loss,test_loss,tickets\n";
  for (const auto& e : log)
    out += std::to_string(e.epoch) + ',' + format_real(e.train_loss) + ',' + format_real(e.test_loss) + ',' +
           std::to_string(e.tickets) + '\n';
  return out;
}

std::string report_json(const EvaluationReport& r) {
  Json doc;
  doc["format_version"] = kReportFormatVersion;
  doc["benchmark"] = r.benchmark;
  doc["detector"] = r.detector;
  doc["fittest"] = r.fittest;
  doc["manifest_hash"] = r.manifest_hash;
  doc["tasks"] = r.tasks;
  doc["faulted_tasks"] = r.faulted_tasks;
  doc["counts"] = Json{{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}};
  const auto& s = r.score;
  doc["score"] = Json{{"tpr", optional_real(s.tpr)},     {"fpr", optional_real(s.fpr)},
                      {"tnr", optional_real(s.tnr)},     {"fnr", optional_real(s.fnr)},
                      {"mre", json_codec::real(s.mre)},  {"ee", json_codec::real(s.ee)},
                      {"overhead", json_codec::real(s.overhead)}, {"eeop", json_codec::real(s.eeop)}};
  doc["quality"] = Json{{"kind", quality_kind_name(r.quality.kind)},
                        {"value", json_codec::real(r.quality.value)},
                        {"baseline", json_codec::real(r.quality.baseline_value)}};
  doc["speedup"] = json_codec::real(r.speedup);
  const auto& c = r.cycles;
  doc["cycles"] = Json{{"reliable", c.reliable},
                       {"unreliable_tasks", c.unreliable_tasks},
                       {"always_reliable", c.always_reliable},
                       {"detect", c.detect},
                       {"correct", c.correct}};
  return doc.dump(2) + "\n";
}

EvaluationReport parse_report(std::string_view text) {
  const Json doc = json_codec::parse(text, "report");
  const Reader r(doc, "report");
  if (r.at("format_version").as_int() != kReportFormatVersion) r.at("format_version").fail("unsupported version");
  EvaluationReport rep;
  rep.benchmark = r.at("benchmark").as_string();
  rep.detector = r.at("detector").as_string();
  rep.fittest = r.at("fittest").as_bool();
  rep.manifest_hash = r.at("manifest_hash").as_string();
  rep.tasks = r.at("tasks").as_uint();
  rep.faulted_tasks = r.at("faulted_tasks").as_uint();
  const auto c = r.at("counts");
  rep.counts = {c.at("tp").as_uint(), c.at("fp").as_uint(), c.at("tn").as_uint(), c.at("fn").as_uint()};
  const auto s = r.at("score");
  rep.score.tpr = read_optional(s.at("tpr"));
  rep.score.fpr = read_optional(s.at("fpr"));
  rep.score.tnr = read_optional(s.at("tnr"));
  rep.score.fnr = read_optional(s.at("fnr"));
  rep.score.mre = s.at("mre").as_real();
  rep.score.ee = s.at("ee").as_real();
  rep.score.overhead = s.at("overhead").as_real();
  rep.score.eeop = s.at("eeop").as_real();
  const auto q = r.at("quality");
  const auto kind = q.at("kind").as_string();
  if (kind == "psnr_db")
    rep.quality.kind = QualityKind::PsnrDb;
  else if (kind == "mean_relative_error")
    rep.quality.kind = QualityKind::MeanRelativeError;
  else
    q.at("kind").fail("unknown quality kind '" + kind + "'");
  rep.quality.value = q.at("value").as_real();
  rep.quality.baseline_value = q.at("baseline").as_real();
  rep.speedup = r.at("speedup").as_real();
  const auto cy = r.at("cycles");
  rep.cycles = {cy.at("reliable").as_real(), cy.at("unreliable_tasks").as_real(), cy.at("always_reliable").as_real(),
                cy.at("detect").as_real(), cy.at("correct").as_real()};
  return rep;
}

EvaluationReport load_report(const std::filesystem::path& path) {
  try {
    return parse_report(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string summary_csv(std::span<const EvaluationReport> reports) {
  std::string out = std::string(kSummaryHeader) + '\n';
  for (const auto& r : reports) {
    out += csv_field(r.benchmark) + ',' + csv_field(r.detector) + ',' + rate_field(r.score.tpr) + ',' + rate_field(r.score.fpr) + ',' +
           format_real(r.score.mre) + ',' + format_real(r.score.ee) + ',' + format_real(r.score.overhead) + ',' +
           format_real(r.score.eeop) + ',' + format_real(r.quality.value) + ',' + format_real(r.speedup) + '\n';
  }
  return out;
}

std::string summary_markdown(std::span<const EvaluationReport> reports) {
  std::vector<const EvaluationReport*> sorted;
  for (const auto& r : reports) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->score.eeop < b->score.eeop; });
  std::ostringstream md;
  md << "| benchmark | detector | TPR | FPR | MRE | EE | overhead | EEOP | quality | speedup |\n"
     << "|---|---|---|---|---|---|---|---|---|---|\n";
  const auto cell = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("-"); };
  for (const auto* r : sorted) {
    md << "| " << r->benchmark << " | " << r->detector << (r->fittest ? " (fittest)" : "") << " | " << cell(r->score.tpr)
       << " | " << cell(r->score.fpr) << " | " << format_real(r->score.mre) << " | " << format_real(r->score.ee)
       << " | " << format_real(r->score.overhead) << " | " << format_real(r->score.eeop) << " | "
       << format_real(r->quality.value) << " | " << format_real(r->speedup) << " |\n";
  }
  return md.str();
}

std::string trace_ndjson(std::span<const TaskRecord> records, bool with_outputs) {
  std::string out;
  for (const auto& r : records) {
    Json j;
    j["task_index"] = r.task_index;
    j["faulted"] = r.faulted;
    j["fault_count"] = r.fault_count;
    j["verdict"] = to_string(r.detector_verdict);
    j["reexecuted"] = r.reexecuted;
    j["always_reliable"] = r.always_reliable;
    j["unit"] = r.unit_index;
    j["cycles_task"] = r.cycles_task;
    j["cycles_detect"] = r.cycles_detect;
    j["cycles_correct"] = r.cycles_correct;
    if (with_outputs) {
      j["reliable_output"] = output_json(r.reliable_output);
      j["observed_output"] = output_json(r.observed_output);
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sdc
