#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "therasim/chat.hpp"
#include "therasim/persona.hpp"

namespace therasim::llm {
class Backend;
}

namespace therasim::selfplay {

inline constexpr const char* kDefaultOpener = "Hello, how may I help you today?";

enum class Speaker { therapist, client };

std::string_view speaker_name(Speaker speaker);
std::optional<Speaker> speaker_from_name(std::string_view name);

struct Turn {
  int index = 0;
  Speaker speaker = Speaker::therapist;
  std::string content;

  bool operator==(const Turn&) const = default;
};

enum class OpenerMode { fixed, generated };

// One session's message sequence plus run metadata. Turns alternate
// speakers starting with the therapist; a complete transcript with T turns
// per agent holds exactly 2T turns.
struct Transcript {
  std::string session_id;
  std::string persona_id;
  int severity_rank = 0;
  llm::GenerationParams params;
  OpenerMode opener_mode = OpenerMode::fixed;
  std::vector<Turn> turns;
  std::string created_at;
  bool complete = false;

  bool operator==(const Transcript&) const = default;
};

struct SessionConfig {
  persona::ClientPersona persona;
  persona::TherapistProfile therapist = persona::default_therapist();
  int turns_per_agent = 10;
  // Fixed therapist opener; nullopt switches the first turn to a generated
  // one.
  std::optional<std::string> opener = std::string(kDefaultOpener);
  llm::GenerationParams params;
  std::string session_id;   // empty -> "<persona.id>-0001"
  std::string created_at;   // empty -> current UTC time
};

// Maps a shared transcript to one agent's point of view: the agent's own
// turns become assistant messages, the other speaker's turns user messages,
// preceded by the agent's system prompt.
std::vector<llm::ChatMessage> agent_view(const Transcript& transcript, Speaker agent,
                                         const persona::PromptText& system_prompt);

// Runs one alternating-turn session to completion. Gateway errors are
// rethrown annotated with the session id and turn index.
Transcript run_session(const SessionConfig& config, llm::Backend& backend);

struct WordStats {
  int violations = 0;
  int max_words = 0;
  double mean_words = 0.0;
};

// Word counts over therapist turns, splitting on whitespace runs;
// violations counts turns longer than `limit` words.
WordStats therapist_word_stats(const Transcript& transcript, int limit);

// Storage surface run_batch writes through; the JSONL implementation lives
// in workbench.
class TranscriptStore {
 public:
  virtual ~TranscriptStore() = default;
  virtual bool contains(const std::string& session_id) const = 0;
  virtual void put(const Transcript& transcript) = 0;
  // Sorted by session_id.
  virtual std::vector<Transcript> read_all() const = 0;
};

struct RunManifest {
  std::vector<persona::ClientPersona> personas;
  persona::TherapistProfile therapist = persona::default_therapist();
  int sessions_per_persona = 100;
  int turns_per_agent = 10;
  std::optional<std::string> opener = std::string(kDefaultOpener);
  llm::GenerationParams params;
  int concurrency_limit = 1;
  int session_retries = 1;
  std::filesystem::path output_dir;
};

struct SessionFailure {
  std::string session_id;
  std::string code;
  std::string message;
};

struct PersonaCounts {
  std::string persona_id;
  int completed = 0;
  int failed = 0;
  int skipped = 0;
};

struct BatchSummary {
  std::vector<PersonaCounts> per_persona;  // manifest order
  std::vector<SessionFailure> failures;    // sorted by session_id
  int completed = 0;
  int failed = 0;
  int skipped = 0;

  int total() const { return completed + failed + skipped; }
  std::string to_text() const;
};

// UTC wall clock in ISO-8601; replaceable for deterministic runs.
using ClockFn = std::function<std::string()>;
std::string utc_now_iso8601();

// session_id = "<persona_id>-<4-digit 1-based ordinal>"
std::string make_session_id(const std::string& persona_id, int ordinal);

// Runs sessions_per_persona sessions for every persona, skipping session
// ids already present in the store. Session failures are retried whole (up
// to session_retries) and recorded in the summary rather than aborting the
// batch. Sessions execute concurrently up to concurrency_limit.
BatchSummary run_batch(const RunManifest& manifest, llm::Backend& backend,
                       TranscriptStore& store, ClockFn clock = {});

}  // namespace therasim::selfplay
