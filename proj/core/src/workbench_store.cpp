#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "therasim/error.hpp"
#include "therasim/workbench.hpp"

namespace therasim::workbench {

namespace {

using nlohmann::json;

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;  // absent store reads as empty
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for append");
  // One buffered write per record keeps concurrent appends line-atomic.
  out << line << '\n' << std::flush;
  if (!out) throw Error(Errc::io_error, "failed appending to " + path.string());
}

}  // namespace

std::string transcript_to_jsonl(const selfplay::Transcript& t) {
  json turns = json::array();
  for (const auto& turn : t.turns) {
    turns.push_back({{"index", turn.index},
                     {"speaker", std::string(selfplay::speaker_name(turn.speaker))},
                     {"content", turn.content}});
  }
  json record = {
      {"session_id", t.session_id},
      {"persona_id", t.persona_id},
      {"severity_rank", t.severity_rank},
      {"model", t.params.model_name},
      {"temperature", t.params.temperature},
      {"opener_mode", t.opener_mode == selfplay::OpenerMode::fixed ? "fixed" : "generated"},
      {"turns", turns},
      {"complete", t.complete},
      {"created_at", t.created_at},
  };
  return record.dump();
}

selfplay::Transcript transcript_from_jsonl(const std::string& line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& ex) {
    throw Error(Errc::malformed_record, ex.what());
  }
  selfplay::Transcript t;
  try {
    t.session_id = record.at("session_id").get<std::string>();
    t.persona_id = record.at("persona_id").get<std::string>();
    t.severity_rank = record.at("severity_rank").get<int>();
    if (t.severity_rank < 0 || t.severity_rank >= persona::kSeverityLevels) {
      throw Error(Errc::malformed_record,
                  "severity_rank " + std::to_string(t.severity_rank) + " out of range");
    }
    t.params.model_name = record.at("model").get<std::string>();
    t.params.temperature = record.at("temperature").get<double>();
    const std::string opener_mode = record.at("opener_mode").get<std::string>();
    if (opener_mode != "fixed" && opener_mode != "generated") {
      throw Error(Errc::malformed_record, "bad opener_mode '" + opener_mode + "'");
    }
    t.opener_mode =
        opener_mode == "fixed" ? selfplay::OpenerMode::fixed : selfplay::OpenerMode::generated;
    for (const auto& turn : record.at("turns")) {
      auto speaker = selfplay::speaker_from_name(turn.at("speaker").get<std::string>());
      if (!speaker) throw Error(Errc::malformed_record, "bad speaker");
      const int index = turn.at("index").get<int>();
      if (index != static_cast<int>(t.turns.size())) {
        throw Error(Errc::malformed_record,
                    "turn indices not contiguous at " + std::to_string(index));
      }
      t.turns.push_back({index, *speaker, turn.at("content").get<std::string>()});
    }
    t.complete = record.at("complete").get<bool>();
    t.created_at = record.at("created_at").get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(Errc::malformed_record, ex.what());
  }
  return t;
}

JsonlTranscriptStore::JsonlTranscriptStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path_)) {
    ++line_no;
    try {
      known_ids_.insert(transcript_from_jsonl(line).session_id);
    } catch (const Error& e) {
      throw Error(Errc::malformed_record,
                  path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

bool JsonlTranscriptStore::contains(const std::string& session_id) const {
  std::scoped_lock lock(mu_);
  return known_ids_.contains(session_id);
}

void JsonlTranscriptStore::put(const selfplay::Transcript& transcript) {
  const std::string line = transcript_to_jsonl(transcript);
  std::scoped_lock lock(mu_);
  append_line(path_, line);
  known_ids_.insert(transcript.session_id);
}

std::vector<selfplay::Transcript> JsonlTranscriptStore::read_all() const {
  std::scoped_lock lock(mu_);
  std::vector<selfplay::Transcript> transcripts;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path_)) {
    ++line_no;
    try {
      transcripts.push_back(transcript_from_jsonl(line));
    } catch (const Error& e) {
      throw Error(Errc::malformed_record,
                  path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(transcripts.begin(), transcripts.end(),
            [](const auto& a, const auto& b) { return a.session_id < b.session_id; });
  return transcripts;
}

std::string annotation_to_jsonl(const analyst::Annotation& a) {
  json flags = json::array();
  for (const auto& flag : a.flags) flags.push_back(flag);
  json record = {
      {"session_id", a.session_id},
      {"mode", std::string(analyst::mode_name(a.mode))},
      {"approach", a.approach},
      {"techniques", a.techniques},
      {"flags", flags},
      {"raw_response", a.raw_response},
  };
  return record.dump();
}

analyst::Annotation annotation_from_jsonl(const std::string& line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& ex) {
    throw Error(Errc::malformed_record, ex.what());
  }
  analyst::Annotation a;
  try {
    a.session_id = record.at("session_id").get<std::string>();
    auto mode = analyst::mode_from_name(record.at("mode").get<std::string>());
    if (!mode) throw Error(Errc::malformed_record, "bad mode");
    a.mode = *mode;
    a.approach = record.at("approach").get<std::string>();
    for (const auto& technique : record.at("techniques")) {
      a.techniques.push_back(technique.get<std::string>());
    }
    for (const auto& flag : record.at("flags")) {
      a.flags.insert(flag.get<std::string>());
    }
    a.raw_response = record.at("raw_response").get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(Errc::malformed_record, ex.what());
  }
  return a;
}

JsonlAnnotationStore::JsonlAnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
}

void JsonlAnnotationStore::put(const analyst::Annotation& annotation) {
  const std::string line = annotation_to_jsonl(annotation);
  std::scoped_lock lock(mu_);
  append_line(path_, line);
}

std::vector<analyst::Annotation> JsonlAnnotationStore::read_all() const {
  std::scoped_lock lock(mu_);
  std::map<std::pair<std::string, analyst::Mode>, analyst::Annotation> latest;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path_)) {
    ++line_no;
    try {
      analyst::Annotation a = annotation_from_jsonl(line);
      latest[{a.session_id, a.mode}] = std::move(a);
    } catch (const Error& e) {
      throw Error(Errc::malformed_record,
                  path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<analyst::Annotation> annotations;
  annotations.reserve(latest.size());
  for (auto& [key, a] : latest) annotations.push_back(std::move(a));
  return annotations;
}

}  // namespace therasim::workbench
