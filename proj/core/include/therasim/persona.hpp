#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace therasim::persona {

// One of the nine diagnostic symptoms of a major depressive episode.
struct DsmCriterion {
  int id = 0;  // 1..9
  std::string description;
};

enum class SeverityLevel { mild, mild_moderate, moderate, moderate_severe, severe };

constexpr int kSeverityLevels = 5;

int severity_rank(SeverityLevel level);
SeverityLevel severity_from_rank(int rank);               // throws INVALID_VALUE outside 0..4
std::string_view severity_name(SeverityLevel level);      // "mild", "mild-moderate", ...
std::optional<SeverityLevel> severity_from_name(std::string_view name);
// Natural-language form used inside prompts ("mild-moderate" -> "mild to moderate").
std::string severity_adjective(SeverityLevel level);

enum class ExtraFeature { clinically_significant_distress, work_impairment };

std::string_view extra_feature_name(ExtraFeature feature);
std::optional<ExtraFeature> extra_feature_from_name(std::string_view name);

// A severity stratum: which symptoms the client presents and any additional
// clinical features attached to that stratum.
struct SeverityProfile {
  SeverityLevel level = SeverityLevel::mild;
  std::set<int> symptom_ids;
  std::set<ExtraFeature> extra_features;

  int rank() const { return severity_rank(level); }
  bool operator==(const SeverityProfile&) const = default;
};

// The nine criteria, in id order.
const std::vector<DsmCriterion>& builtin_criteria();

// The five severity strata in ascending rank. Symptom sets are strictly
// nested along increasing rank.
const std::vector<SeverityProfile>& builtin_severity_registry();

enum class Trait { openness, extraversion, agreeableness, emotional_stability };
enum class TraitLevel { low, medium, high };

std::string_view trait_name(Trait trait);            // "openness", ..., "emotional-stability"
std::string_view trait_display(Trait trait);         // "emotional stability"
std::optional<Trait> trait_from_name(std::string_view name);
std::string_view trait_level_name(TraitLevel level); // "low", "medium", "high"
std::optional<TraitLevel> trait_level_from_name(std::string_view name);

// What a struggle bullet is evidence of: a criterion id or an extra feature.
using SymptomRef = std::variant<int, ExtraFeature>;

// Structured client vignette. Renders to the client actor's system prompt.
struct ClientPersona {
  std::string id;
  std::string name;
  int age = 0;
  std::string locale;
  std::string context_narrative;
  std::vector<std::string> emotional_struggles;
  std::map<Trait, TraitLevel> personality;
  std::map<Trait, std::string> personality_notes;  // optional parenthetical gloss per trait
  SeverityProfile severity;
  std::vector<std::string> guidelines;
  std::vector<std::string> reflection_questions;
  // struggle text -> what it portrays; required for every struggle.
  std::map<std::string, SymptomRef> traceability;

  bool operator==(const ClientPersona&) const = default;
};

// Structured therapist vignette. The guideline list may reference
// {max_words}, replaced with max_words_guideline at render time.
struct TherapistProfile {
  std::string id;
  std::string preamble;
  std::vector<std::string> reflection_questions;
  std::vector<std::string> guidelines;
  int max_words_guideline = 40;

  bool operator==(const TherapistProfile&) const = default;
};

// Built-in vignette fixtures, one per severity level. Only the moderate
// actor is canonical; the other four follow the same structure with
// struggles chosen to match their severity stratum.
const ClientPersona& builtin_persona(SeverityLevel level);
const std::vector<ClientPersona>& builtin_personas();
const TherapistProfile& default_therapist();

struct Violation {
  std::string code;    // e.g. "SYMPTOM_SET_MISMATCH"
  std::string detail;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks a persona against a severity registry. Violations are data, not
// failures; every problem found is reported with a machine-readable code.
ValidationResult validate_persona(const ClientPersona& persona,
                                  const std::vector<SeverityProfile>& registry =
                                      builtin_severity_registry());

// Rendered system prompt plus the character offset of each named section,
// in declared order.
struct PromptText {
  std::string text;
  std::vector<std::pair<std::string, std::size_t>> section_index;

  std::optional<std::size_t> section_offset(std::string_view name) const;
};

// Render skeleton for the client prompt. The preamble contains a
// {severity} placeholder. Editable data: load_client_template() reads the
// same structure from a JSON file.
struct ClientPromptTemplate {
  std::string preamble;
  std::string reflection_header;
  std::string context_header;
  std::string struggles_header;
  std::string personality_header;
  std::string guidelines_header;
};

struct TherapistPromptTemplate {
  std::string reflection_header;
  std::string guidelines_header;
};

const ClientPromptTemplate& default_client_template();
const TherapistPromptTemplate& default_therapist_template();

ClientPromptTemplate load_client_template(const std::filesystem::path& path);
TherapistPromptTemplate load_therapist_template(const std::filesystem::path& path);

// Deterministic rendering: identical input yields byte-identical output.
// Throws INVALID_PERSONA / INVALID_PROFILE when the input does not validate.
PromptText render_client_prompt(const ClientPersona& persona,
                                const ClientPromptTemplate& tmpl = default_client_template());
PromptText render_therapist_prompt(const TherapistProfile& profile,
                                   const TherapistPromptTemplate& tmpl =
                                       default_therapist_template());

// Profile documents are JSON files whose field names mirror the struct
// fields exactly; see docs/file-formats.md for the canonical example.
ClientPersona load_client_persona(const std::filesystem::path& path);
TherapistProfile load_therapist_profile(const std::filesystem::path& path);
std::string persona_to_json(const ClientPersona& persona);   // pretty-printed document
std::string therapist_to_json(const TherapistProfile& profile);

}  // namespace therasim::persona
