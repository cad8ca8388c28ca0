#include "therasim/persona.hpp"

#include <algorithm>

#include "therasim/error.hpp"

namespace therasim::persona {

namespace {

constexpr std::string_view kSeverityNames[kSeverityLevels] = {
    "mild", "mild-moderate", "moderate", "moderate-severe", "severe"};

constexpr std::string_view kSeverityAdjectives[kSeverityLevels] = {
    "mild", "mild to moderate", "moderate", "moderate to severe", "severe"};

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string capitalized(std::string_view word) {
  std::string out(word);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace

int severity_rank(SeverityLevel level) { return static_cast<int>(level); }

SeverityLevel severity_from_rank(int rank) {
  if (rank < 0 || rank >= kSeverityLevels) {
    throw Error(Errc::invalid_value, "severity rank out of range: " + std::to_string(rank));
  }
  return static_cast<SeverityLevel>(rank);
}

std::string_view severity_name(SeverityLevel level) {
  return kSeverityNames[severity_rank(level)];
}

std::optional<SeverityLevel> severity_from_name(std::string_view name) {
  for (int i = 0; i < kSeverityLevels; ++i) {
    if (name == kSeverityNames[i]) return static_cast<SeverityLevel>(i);
  }
  return std::nullopt;
}

std::string severity_adjective(SeverityLevel level) {
  return std::string(kSeverityAdjectives[severity_rank(level)]);
}

std::string_view extra_feature_name(ExtraFeature feature) {
  switch (feature) {
    case ExtraFeature::clinically_significant_distress: return "clinically-significant-distress";
    case ExtraFeature::work_impairment: return "work-impairment";
  }
  return "";
}

std::optional<ExtraFeature> extra_feature_from_name(std::string_view name) {
  if (name == "clinically-significant-distress") return ExtraFeature::clinically_significant_distress;
  if (name == "work-impairment") return ExtraFeature::work_impairment;
  return std::nullopt;
}

std::string_view trait_name(Trait trait) {
  switch (trait) {
    case Trait::openness: return "openness";
    case Trait::extraversion: return "extraversion";
    case Trait::agreeableness: return "agreeableness";
    case Trait::emotional_stability: return "emotional-stability";
  }
  return "";
}

std::string_view trait_display(Trait trait) {
  return trait == Trait::emotional_stability ? "emotional stability" : trait_name(trait);
}

std::optional<Trait> trait_from_name(std::string_view name) {
  for (Trait t : {Trait::openness, Trait::extraversion, Trait::agreeableness,
                  Trait::emotional_stability}) {
    if (name == trait_name(t)) return t;
  }
  return std::nullopt;
}

std::string_view trait_level_name(TraitLevel level) {
  switch (level) {
    case TraitLevel::low: return "low";
    case TraitLevel::medium: return "medium";
    case TraitLevel::high: return "high";
  }
  return "";
}

std::optional<TraitLevel> trait_level_from_name(std::string_view name) {
  for (TraitLevel l : {TraitLevel::low, TraitLevel::medium, TraitLevel::high}) {
    if (name == trait_level_name(l)) return l;
  }
  return std::nullopt;
}

ValidationResult validate_persona(const ClientPersona& persona,
                                  const std::vector<SeverityProfile>& registry) {
  ValidationResult result;
  auto add = [&](std::string code, std::string detail) {
    result.violations.push_back({std::move(code), std::move(detail)});
  };

  if (persona.id.empty()) add("EMPTY_FIELD", "id is empty");
  if (persona.name.empty()) add("EMPTY_FIELD", "name is empty");
  if (persona.age <= 0) add("INVALID_AGE", "age must be positive, got " + std::to_string(persona.age));
  if (persona.context_narrative.empty()) add("EMPTY_FIELD", "context_narrative is empty");
  if (persona.guidelines.empty()) add("EMPTY_FIELD", "guidelines is empty");

  const SeverityProfile* entry = nullptr;
  for (const auto& profile : registry) {
    if (profile.level == persona.severity.level) {
      entry = &profile;
      break;
    }
  }
  if (entry == nullptr) {
    add("UNKNOWN_SEVERITY",
        "severity level '" + std::string(severity_name(persona.severity.level)) +
            "' not in registry");
  } else {
    if (persona.severity.symptom_ids != entry->symptom_ids) {
      add("SYMPTOM_SET_MISMATCH",
          "symptom set does not match the registry entry for '" +
              std::string(severity_name(entry->level)) + "'");
    }
    if (persona.severity.extra_features != entry->extra_features) {
      add("EXTRA_FEATURES_MISMATCH",
          "extra features do not match the registry entry for '" +
              std::string(severity_name(entry->level)) + "'");
    }
  }

  if (persona.emotional_struggles.empty()) {
    add("EMPTY_STRUGGLES", "emotional_struggles must be non-empty");
  }
  for (const auto& struggle : persona.emotional_struggles) {
    auto it = persona.traceability.find(struggle);
    if (it == persona.traceability.end()) {
      add("UNTRACEABLE_STRUGGLE", "no traceability entry for struggle: " + struggle);
      continue;
    }
    if (const int* id = std::get_if<int>(&it->second)) {
      if (!persona.severity.symptom_ids.contains(*id)) {
        add("UNTRACEABLE_STRUGGLE",
            "struggle maps to symptom " + std::to_string(*id) +
                " which is not in the severity set: " + struggle);
      }
    } else {
      ExtraFeature feature = std::get<ExtraFeature>(it->second);
      if (!persona.severity.extra_features.contains(feature)) {
        add("UNTRACEABLE_STRUGGLE",
            "struggle maps to feature '" + std::string(extra_feature_name(feature)) +
                "' which is not in the severity profile: " + struggle);
      }
    }
  }

  for (Trait t : {Trait::openness, Trait::extraversion, Trait::agreeableness,
                  Trait::emotional_stability}) {
    if (!persona.personality.contains(t)) {
      add("MISSING_TRAIT", "personality is missing trait '" + std::string(trait_name(t)) + "'");
    }
  }

  return result;
}

std::optional<std::size_t> PromptText::section_offset(std::string_view name) const {
  for (const auto& [section, offset] : section_index) {
    if (section == name) return offset;
  }
  return std::nullopt;
}

namespace {

struct PromptBuilder {
  std::string text;
  std::vector<std::pair<std::string, std::size_t>> sections;

  void begin_section(std::string name) { sections.emplace_back(std::move(name), text.size()); }
  void line(std::string_view s) {
    text += s;
    text += '\n';
  }
  void blank() { text += '\n'; }
};

}  // namespace

PromptText render_client_prompt(const ClientPersona& persona, const ClientPromptTemplate& tmpl) {
  ValidationResult validation = validate_persona(persona);
  if (!validation.ok()) {
    std::string codes;
    for (const auto& v : validation.violations) {
      if (!codes.empty()) codes += ", ";
      codes += v.code;
    }
    throw Error(Errc::invalid_persona, "persona '" + persona.id + "' failed validation: " + codes);
  }

  PromptBuilder b;
  b.begin_section("preamble");
  b.line(replace_all(tmpl.preamble, "{severity}", severity_adjective(persona.severity.level)));
  b.blank();

  b.begin_section("reflection_questions");
  b.line(tmpl.reflection_header);
  for (std::size_t i = 0; i < persona.reflection_questions.size(); ++i) {
    b.line(std::to_string(i + 1) + ". " + persona.reflection_questions[i]);
  }
  b.blank();

  b.begin_section("context");
  b.line(tmpl.context_header);
  b.line(persona.context_narrative);
  b.blank();

  b.begin_section("struggles");
  b.line(tmpl.struggles_header);
  for (const auto& struggle : persona.emotional_struggles) {
    b.line("- " + struggle);
  }
  b.blank();

  b.begin_section("personality");
  b.line(tmpl.personality_header);
  for (const auto& [trait, level] : persona.personality) {
    std::string bullet = "- " + capitalized(trait_level_name(level)) + " " +
                         std::string(trait_display(trait));
    auto note = persona.personality_notes.find(trait);
    if (note != persona.personality_notes.end() && !note->second.empty()) {
      bullet += " (" + note->second + ")";
    }
    b.line(bullet);
  }
  b.blank();

  b.begin_section("guidelines");
  b.line(tmpl.guidelines_header);
  for (const auto& guideline : persona.guidelines) {
    b.line("- " + guideline);
  }

  return PromptText{std::move(b.text), std::move(b.sections)};
}

PromptText render_therapist_prompt(const TherapistProfile& profile,
                                   const TherapistPromptTemplate& tmpl) {
  if (profile.preamble.empty()) {
    throw Error(Errc::invalid_profile, "therapist profile '" + profile.id + "' has empty preamble");
  }
  if (profile.guidelines.empty()) {
    throw Error(Errc::invalid_profile,
                "therapist profile '" + profile.id + "' has empty guidelines");
  }

  const std::string max_words = std::to_string(profile.max_words_guideline);

  PromptBuilder b;
  b.begin_section("preamble");
  b.line(profile.preamble);
  b.blank();

  b.begin_section("reflection_questions");
  b.line(tmpl.reflection_header);
  for (std::size_t i = 0; i < profile.reflection_questions.size(); ++i) {
    b.line(std::to_string(i + 1) + ". " + profile.reflection_questions[i]);
  }
  b.blank();

  b.begin_section("guidelines");
  b.line(tmpl.guidelines_header);
  for (const auto& guideline : profile.guidelines) {
    b.line("- " + replace_all(guideline, "{max_words}", max_words));
  }

  return PromptText{std::move(b.text), std::move(b.sections)};
}

}  // namespace therasim::persona
