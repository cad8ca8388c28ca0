#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "therasim/chat.hpp"
#include "therasim/selfplay.hpp"

namespace therasim::llm {
class Backend;
}

namespace therasim::analyst {

// One of the twelve recognized therapeutic approaches.
struct ApproachLabel {
  std::string canonical_name;  // "SFBT", "PCT", "Existential Therapy", ...
  std::string full_name;
  std::string key_traits;
  std::string llm_indicators;
};

// One of the twenty-one recognized in-conversation techniques; approach_tags
// is a non-empty subset of {SFBT, CBT, MI}.
struct TechniqueLabel {
  std::string canonical_name;
  std::set<std::string> approach_tags;
};

const std::vector<ApproachLabel>& approach_taxonomy();
const std::vector<TechniqueLabel>& technique_taxonomy();

// Label key normalization: lowercase, parenthetical segments stripped,
// '&' read as "and", '-' and '/' separators unified, whitespace runs
// collapsed. Idempotent.
std::string normalize_label(std::string_view raw);

// Strict closed-world matching: canonical name for a known label (or any of
// its accepted alias forms), nullopt otherwise.
std::optional<std::string> match_approach(std::string_view raw);
std::optional<std::string> match_technique(std::string_view raw);

enum class Mode { single, multi };

std::string_view mode_name(Mode mode);
std::optional<Mode> mode_from_name(std::string_view name);

inline constexpr const char* kFlagMultipleGivenInSingleMode = "MULTIPLE_GIVEN_IN_SINGLE_MODE";
inline constexpr const char* kFlagNormalized = "NORMALIZED";

struct Annotation {
  std::string session_id;
  Mode mode = Mode::single;
  std::string approach;
  std::vector<std::string> techniques;  // deduplicated, first-mention order
  std::string raw_response;
  std::set<std::string> flags;

  bool operator==(const Annotation&) const = default;
};

// Classifier prompt skeleton. The label lists are always generated from the
// registries; the surrounding instructions are editable data.
struct AnalystPromptTemplate {
  std::string system_preamble;
  std::string approaches_header;
  std::string techniques_header;
  std::string format_instruction;
  std::string single_mode_instruction;
  std::string multi_mode_instruction;
  std::string transcript_header;
  std::string correction_instruction;
};

const AnalystPromptTemplate& default_analyst_template();
AnalystPromptTemplate load_analyst_template(const std::filesystem::path& path);

// Builds the deterministic classification request for one complete
// transcript: system message with role, label lists and output grammar; user
// message with the speaker-prefixed transcript. Throws INCOMPLETE_TRANSCRIPT.
llm::ChatRequest build_annotation_request(const selfplay::Transcript& transcript, Mode mode,
                                          const AnalystPromptTemplate& tmpl =
                                              default_analyst_template());

// Parses the analyst reply against the grammar
//   APPROACH: <label>
//   TECHNIQUES: <label>[; <label>...]
// Labels are canonicalized; unknown labels are errors, never invented. In
// single mode extra techniques are dropped after the first and flagged.
Annotation parse_annotation(const std::string& raw, Mode mode, const std::string& session_id);

class AnnotationStore {
 public:
  virtual ~AnnotationStore() = default;
  virtual void put(const Annotation& annotation) = 0;
  // Sorted by (session_id, mode); one record per key (last write wins).
  virtual std::vector<Annotation> read_all() const = 0;
};

struct AnnotationFailure {
  std::string session_id;
  std::string code;
  std::string message;
};

struct AnnotateReport {
  std::vector<Annotation> annotations;   // sorted by session_id
  std::vector<AnnotationFailure> failures;
  int retried = 0;

  std::string to_text() const;
};

struct AnnotateOptions {
  int concurrency = 1;
  AnalystPromptTemplate prompt = default_analyst_template();
  llm::GenerationParams params = llm::analyst_params();
};

// Annotates every complete transcript. A reply that fails to parse is
// retried once with an appended correction instruction; a second failure is
// recorded as an error rather than aborting the batch.
AnnotateReport annotate_batch(const std::vector<selfplay::Transcript>& transcripts,
                              llm::Backend& backend, Mode mode, AnnotationStore& store,
                              const AnnotateOptions& options = {});

}  // namespace therasim::analyst
