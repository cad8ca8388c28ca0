#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "therasim/analyst.hpp"
#include "therasim/backend.hpp"
#include "therasim/selfplay.hpp"

namespace therasim::workbench {

// Line-delimited JSON transcript store: one record per line with fields
// {session_id, persona_id, severity_rank, model, temperature, opener_mode,
// turns:[{index, speaker, content}], complete, created_at}. Appends are
// atomic per record; reads are sorted by session_id.
class JsonlTranscriptStore : public selfplay::TranscriptStore {
 public:
  explicit JsonlTranscriptStore(std::filesystem::path path);

  bool contains(const std::string& session_id) const override;
  void put(const selfplay::Transcript& transcript) override;
  std::vector<selfplay::Transcript> read_all() const override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::set<std::string> known_ids_;
};

std::string transcript_to_jsonl(const selfplay::Transcript& transcript);
selfplay::Transcript transcript_from_jsonl(const std::string& line);

// Line-delimited JSON annotation store with fields {session_id, mode,
// approach, techniques, flags, raw_response}. Append-only; on read the last
// record per (session_id, mode) wins.
class JsonlAnnotationStore : public analyst::AnnotationStore {
 public:
  explicit JsonlAnnotationStore(std::filesystem::path path);

  void put(const analyst::Annotation& annotation) override;
  std::vector<analyst::Annotation> read_all() const override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

std::string annotation_to_jsonl(const analyst::Annotation& annotation);
analyst::Annotation annotation_from_jsonl(const std::string& line);

// Reads a JSON run manifest. Field names mirror RunManifest; unknown fields
// are rejected, defaults (100 sessions per persona, 10 turns per agent) are
// applied only for absent fields. Persona entries are built-in level names
// or paths to persona documents, resolved relative to the manifest file.
selfplay::RunManifest load_manifest(const std::filesystem::path& path);

// Reads a scripted-backend script: a JSON object mapping agent tags (or
// "tag:session_id" overrides) to reply arrays.
llm::ScriptedBackend::Script load_script(const std::filesystem::path& path);

// Self-contained HTML document with speaker-attributed message bubbles in
// turn order and a header carrying the persona summary. No network
// resources; deterministic bytes.
std::string render_transcript_html(const selfplay::Transcript& transcript,
                                   const std::string& persona_summary);

}  // namespace therasim::workbench
