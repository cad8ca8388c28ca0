#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "therasim/analytics.hpp"
#include "therasim/analyst.hpp"
#include "therasim/backend.hpp"
#include "therasim/error.hpp"
#include "therasim/http_backend.hpp"
#include "therasim/persona.hpp"
#include "therasim/selfplay.hpp"
#include "therasim/workbench.hpp"

namespace {

namespace fs = std::filesystem;
using namespace therasim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitFatal = 3;

constexpr const char* kOfflineTimestamp = "1970-01-01T00:00:00Z";

struct BackendSpec {
  std::string value = "scripted:";
  std::string endpoint;
  std::string completions_path;
  std::string auth_env = "THERASIM_API_KEY";
  int max_attempts = 3;
  int rate_limit = 0;

  bool scripted() const { return value.rfind("scripted:", 0) == 0; }

  std::unique_ptr<llm::Backend> make() const {
    if (scripted()) {
      const std::string script_path = value.substr(std::string("scripted:").size());
      if (script_path.empty()) {
        throw Error(Errc::invalid_value, "scripted backend needs a script path "
                                         "(--backend scripted:<path>)");
      }
      return std::make_unique<llm::ScriptedBackend>(workbench::load_script(script_path));
    }
    if (value != "live") {
      throw Error(Errc::invalid_value, "backend must be 'live' or 'scripted:<path>'");
    }
    llm::HttpBackendConfig config;
    if (!endpoint.empty()) {
      config.base_url = endpoint;
    } else if (const char* env = std::getenv("THERASIM_ENDPOINT"); env && *env) {
      config.base_url = env;
    }
    if (!completions_path.empty()) {
      config.completions_path = completions_path;
    } else if (const char* env = std::getenv("THERASIM_COMPLETIONS_PATH"); env && *env) {
      config.completions_path = env;
    }
    config.auth_env_var = auth_env;
    config.retry.max_attempts = max_attempts;
    config.retry.rate_limit_max_requests = rate_limit;
    return std::make_unique<llm::HttpBackend>(config);
  }
};

void add_backend_flags(CLI::App* cmd, BackendSpec& spec) {
  cmd->add_option("--backend", spec.value,
                  "'live' or 'scripted:<script.json>' (default scripted)");
  cmd->add_option("--endpoint", spec.endpoint,
                  "live backend base URL (env THERASIM_ENDPOINT)");
  cmd->add_option("--completions-path", spec.completions_path,
                  "chat-completions path (env THERASIM_COMPLETIONS_PATH)");
  cmd->add_option("--auth-env", spec.auth_env,
                  "environment variable holding the bearer token");
  cmd->add_option("--max-attempts", spec.max_attempts, "live retry attempts");
  cmd->add_option("--rate-limit", spec.rate_limit, "live requests per minute (0 = unlimited)");
}

std::string severity_label(int rank) {
  return std::string(persona::severity_name(persona::severity_from_rank(rank)));
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << content;
}

int cmd_simulate(const std::string& manifest_path, const BackendSpec& backend_spec,
                 const std::string& out_dir, int concurrency) {
  selfplay::RunManifest manifest = workbench::load_manifest(manifest_path);
  if (!out_dir.empty()) manifest.output_dir = out_dir;
  if (manifest.output_dir.empty()) {
    throw Error(Errc::invalid_value, "no output directory (--out or manifest output_dir)");
  }
  if (concurrency > 0) manifest.concurrency_limit = concurrency;

  auto backend = backend_spec.make();
  workbench::JsonlTranscriptStore store(manifest.output_dir / "transcripts.jsonl");
  selfplay::ClockFn clock;
  if (backend_spec.scripted()) {
    clock = [] { return std::string(kOfflineTimestamp); };
  }

  selfplay::BatchSummary summary = selfplay::run_batch(manifest, *backend, store, clock);
  const std::string text = summary.to_text();
  std::cout << text;
  write_text_file(manifest.output_dir / "batch_summary.txt", text);
  return summary.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_annotate(const std::string& transcripts_dir, const std::string& mode_value,
                 const BackendSpec& backend_spec, std::string out_file, int concurrency,
                 const std::string& model) {
  auto mode = analyst::mode_from_name(mode_value);
  if (!mode) throw Error(Errc::invalid_value, "mode must be 'single' or 'multi'");

  workbench::JsonlTranscriptStore transcripts(fs::path(transcripts_dir) / "transcripts.jsonl");
  const auto all = transcripts.read_all();
  if (all.empty()) {
    throw Error(Errc::empty_input, "no transcripts under " + transcripts_dir);
  }

  if (out_file.empty()) {
    out_file = (fs::path(transcripts_dir) / ("annotations-" + mode_value + ".jsonl")).string();
  }
  workbench::JsonlAnnotationStore store((fs::path(out_file)));

  analyst::AnnotateOptions options;
  if (concurrency > 0) options.concurrency = concurrency;
  if (!model.empty()) options.params.model_name = model;

  auto backend = backend_spec.make();
  analyst::AnnotateReport report = analyst::annotate_batch(all, *backend, *mode, store, options);
  std::cout << report.to_text();
  std::cout << "annotations written to " << out_file << "\n";
  return report.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const std::string& annotations_path, const std::string& transcripts_dir,
               const std::string& group_by, const std::string& out_dir, double flat_threshold) {
  if (group_by != "severity") {
    throw Error(Errc::invalid_value, "--group-by supports only 'severity'");
  }

  workbench::JsonlAnnotationStore annotation_store((fs::path(annotations_path)));
  const auto annotations = annotation_store.read_all();
  if (annotations.empty()) {
    throw Error(Errc::empty_input, "no annotations in " + annotations_path);
  }
  workbench::JsonlTranscriptStore transcript_store(fs::path(transcripts_dir) /
                                                   "transcripts.jsonl");
  const auto index = analytics::build_severity_index(transcript_store.read_all());

  std::map<analyst::Mode, std::vector<analyst::Annotation>> by_mode;
  for (const auto& a : annotations) by_mode[a.mode].push_back(a);

  std::vector<analytics::NamedDistribution> distributions;
  std::vector<analytics::NamedFrequency> frequencies;
  std::ostringstream report_index;
  report_index << "therasim report\n===============\n";
  report_index << "annotations: " << annotations_path << " (" << annotations.size()
               << " records)\n";
  report_index << "transcripts: " << transcripts_dir << " (" << index.size() << " sessions)\n";

  for (const auto& [mode, records] : by_mode) {
    const std::string mode_tag(analyst::mode_name(mode));
    auto severity_table =
        analytics::approach_distribution(records, index, analytics::Grouping::severity);
    auto overall_table =
        analytics::approach_distribution(records, index, analytics::Grouping::none);
    auto frequency_table = analytics::technique_frequency(records, mode);

    report_index << "\nmode " << mode_tag << " (" << records.size() << " sessions)\n";
    report_index << "  tables:\n";
    report_index << "    approach_distribution_severity_" << mode_tag << ".csv/.svg\n";
    report_index << "    approach_distribution_overall_" << mode_tag << ".csv/.svg\n";
    report_index << "    technique_frequency_" << mode_tag << ".csv/.svg\n";
    report_index << "  trends (severity rank vs. approach share, spearman rho; |rho| < "
                 << flat_threshold << " reads flat):\n";
    for (const auto& approach : analyst::approach_taxonomy()) {
      try {
        auto trend =
            analytics::monotonic_trend(severity_table, approach.canonical_name, flat_threshold);
        char line[160];
        std::snprintf(line, sizeof(line), "    %-22s rho = %+.3f (%s)\n",
                      approach.canonical_name.c_str(), trend.rho,
                      std::string(analytics::trend_direction_name(trend.direction)).c_str());
        report_index << line;
      } catch (const Error& e) {
        if (e.code() != Errc::missing_groups) throw;
        report_index << "    " << approach.canonical_name
                     << ": skipped (needs all 5 severity groups)\n";
      }
    }

    distributions.push_back({"approach_distribution_severity_" + mode_tag, severity_table});
    distributions.push_back({"approach_distribution_overall_" + mode_tag, overall_table});
    frequencies.push_back({"technique_frequency_" + mode_tag, frequency_table});
  }

  const auto files = analytics::export_tables(distributions, frequencies, out_dir);
  report_index << "\nfiles written: " << files.size() + 1 << " under " << out_dir << "\n";
  write_text_file(fs::path(out_dir) / "report_index.txt", report_index.str());
  std::cout << report_index.str();
  return kExitOk;
}

int cmd_render(const std::string& transcripts_dir, const std::string& session_id,
               const std::string& out_file) {
  workbench::JsonlTranscriptStore store(fs::path(transcripts_dir) / "transcripts.jsonl");
  for (const auto& transcript : store.read_all()) {
    if (transcript.session_id != session_id) continue;
    const std::string summary = "persona " + transcript.persona_id + ", severity " +
                                severity_label(transcript.severity_rank) + " (rank " +
                                std::to_string(transcript.severity_rank) + ")";
    write_text_file(out_file, workbench::render_transcript_html(transcript, summary));
    std::cout << "wrote " << out_file << "\n";
    return kExitOk;
  }
  throw Error(Errc::invalid_value, "no stored session '" + session_id + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-play therapy dialogue simulation, annotation and reporting"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a batch of self-play sessions");
  std::string manifest_path;
  std::string sim_out;
  int sim_concurrency = 0;
  BackendSpec sim_backend;
  simulate->add_option("--manifest", manifest_path, "run manifest (JSON)")->required();
  simulate->add_option("--out", sim_out, "output directory");
  simulate->add_option("--concurrency", sim_concurrency, "parallel sessions");
  add_backend_flags(simulate, sim_backend);

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Classify stored transcripts");
  std::string ann_transcripts;
  std::string ann_mode = "single";
  std::string ann_out;
  std::string ann_model;
  int ann_concurrency = 0;
  BackendSpec ann_backend;
  annotate->add_option("--transcripts", ann_transcripts, "directory with transcripts.jsonl")
      ->required();
  annotate->add_option("--mode", ann_mode, "'single' or 'multi'");
  annotate->add_option("--out", ann_out, "annotations file (default inside --transcripts)");
  annotate->add_option("--concurrency", ann_concurrency, "parallel requests");
  annotate->add_option("--model", ann_model, "analyst model name");
  add_backend_flags(annotate, ann_backend);

  // report
  auto* report = app.add_subcommand("report", "Aggregate annotations into tables and charts");
  std::string rep_annotations;
  std::string rep_transcripts;
  std::string rep_group_by = "severity";
  std::string rep_out;
  double rep_flat_threshold = 0.3;
  report->add_option("--annotations", rep_annotations, "annotations file")->required();
  report->add_option("--transcripts", rep_transcripts, "directory with transcripts.jsonl")
      ->required();
  report->add_option("--group-by", rep_group_by, "grouping (severity)");
  report->add_option("--out", rep_out, "output directory")->required();
  report->add_option("--flat-threshold", rep_flat_threshold,
                     "|rho| below this reports a flat trend");

  // render
  auto* render = app.add_subcommand("render", "Export one session as static HTML");
  std::string ren_transcripts;
  std::string ren_session;
  std::string ren_out;
  render->add_option("--transcripts", ren_transcripts, "directory with transcripts.jsonl")
      ->required();
  render->add_option("--transcript", ren_session, "session id")->required();
  render->add_option("--out", ren_out, "output HTML file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(manifest_path, sim_backend, sim_out, sim_concurrency);
    }
    if (annotate->parsed()) {
      return cmd_annotate(ann_transcripts, ann_mode, ann_backend, ann_out, ann_concurrency,
                          ann_model);
    }
    if (report->parsed()) {
      return cmd_report(rep_annotations, rep_transcripts, rep_group_by, rep_out,
                        rep_flat_threshold);
    }
    if (render->parsed()) {
      return cmd_render(ren_transcripts, ren_session, ren_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}
