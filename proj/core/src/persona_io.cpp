#include <fstream>
#include <sstream>

#include <json.hpp>

#include "therasim/error.hpp"
#include "therasim/persona.hpp"

namespace therasim::persona {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw Error(Errc::parse_error, path.string() + ": " + ex.what());
  }
}

[[noreturn]] void bad_field(const std::filesystem::path& path, const std::string& field,
                            const std::string& why) {
  throw Error(Errc::invalid_value, path.string() + ": field '" + field + "': " + why);
}

std::vector<std::string> string_list(const json& doc, const std::string& field,
                                     const std::filesystem::path& path) {
  if (!doc.contains(field)) return {};
  if (!doc.at(field).is_array()) bad_field(path, field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : doc.at(field)) {
    if (!item.is_string()) bad_field(path, field, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

SeverityProfile severity_from_json(const json& value, const std::filesystem::path& path) {
  if (value.is_string()) {
    auto level = severity_from_name(value.get<std::string>());
    if (!level) bad_field(path, "severity", "unknown level '" + value.get<std::string>() + "'");
    for (const auto& profile : builtin_severity_registry()) {
      if (profile.level == *level) return profile;
    }
  }
  if (value.is_object()) {
    SeverityProfile profile;
    auto level = severity_from_name(value.value("level", ""));
    if (!level) bad_field(path, "severity.level", "unknown level");
    profile.level = *level;
    for (const auto& id : value.value("symptom_ids", json::array())) {
      profile.symptom_ids.insert(id.get<int>());
    }
    for (const auto& name : value.value("extra_features", json::array())) {
      auto feature = extra_feature_from_name(name.get<std::string>());
      if (!feature) bad_field(path, "severity.extra_features", "unknown feature");
      profile.extra_features.insert(*feature);
    }
    return profile;
  }
  bad_field(path, "severity", "expected a level name or an object");
}

json severity_to_json(const SeverityProfile& profile) {
  json ids = json::array();
  for (int id : profile.symptom_ids) ids.push_back(id);
  json features = json::array();
  for (ExtraFeature f : profile.extra_features) features.push_back(std::string(extra_feature_name(f)));
  return json{{"level", std::string(severity_name(profile.level))},
              {"symptom_ids", ids},
              {"extra_features", features}};
}

}  // namespace

ClientPersona load_client_persona(const std::filesystem::path& path) {
  json doc = parse_file(path);
  ClientPersona p;
  p.id = doc.value("id", "");
  p.name = doc.value("name", "");
  p.age = doc.value("age", 0);
  p.locale = doc.value("locale", "");
  p.context_narrative = doc.value("context_narrative", "");
  p.emotional_struggles = string_list(doc, "emotional_struggles", path);
  p.guidelines = string_list(doc, "guidelines", path);
  p.reflection_questions = string_list(doc, "reflection_questions", path);

  if (!doc.contains("severity")) bad_field(path, "severity", "required");
  p.severity = severity_from_json(doc.at("severity"), path);

  const json personality = doc.value("personality", json::object());
  for (const auto& [key, value] : personality.items()) {
    auto trait = trait_from_name(key);
    if (!trait) bad_field(path, "personality", "unknown trait '" + key + "'");
    auto level = trait_level_from_name(value.get<std::string>());
    if (!level) bad_field(path, "personality." + key, "unknown level");
    p.personality[*trait] = *level;
  }
  const json notes = doc.value("personality_notes", json::object());
  for (const auto& [key, value] : notes.items()) {
    auto trait = trait_from_name(key);
    if (!trait) bad_field(path, "personality_notes", "unknown trait '" + key + "'");
    p.personality_notes[*trait] = value.get<std::string>();
  }
  const json trace = doc.value("traceability", json::object());
  for (const auto& [key, value] : trace.items()) {
    if (value.is_number_integer()) {
      p.traceability[key] = value.get<int>();
    } else if (value.is_string()) {
      auto feature = extra_feature_from_name(value.get<std::string>());
      if (!feature) bad_field(path, "traceability", "unknown feature '" + value.get<std::string>() + "'");
      p.traceability[key] = *feature;
    } else {
      bad_field(path, "traceability", "expected a criterion id or a feature name");
    }
  }
  return p;
}

TherapistProfile load_therapist_profile(const std::filesystem::path& path) {
  json doc = parse_file(path);
  TherapistProfile t;
  t.id = doc.value("id", "");
  t.preamble = doc.value("preamble", "");
  t.reflection_questions = string_list(doc, "reflection_questions", path);
  t.guidelines = string_list(doc, "guidelines", path);
  t.max_words_guideline = doc.value("max_words_guideline", 40);
  if (t.max_words_guideline <= 0) bad_field(path, "max_words_guideline", "must be positive");
  return t;
}

std::string persona_to_json(const ClientPersona& p) {
  json doc;
  doc["id"] = p.id;
  doc["name"] = p.name;
  doc["age"] = p.age;
  doc["locale"] = p.locale;
  doc["context_narrative"] = p.context_narrative;
  doc["emotional_struggles"] = p.emotional_struggles;
  json personality = json::object();
  for (const auto& [trait, level] : p.personality) {
    personality[std::string(trait_name(trait))] = std::string(trait_level_name(level));
  }
  doc["personality"] = personality;
  json notes = json::object();
  for (const auto& [trait, note] : p.personality_notes) {
    notes[std::string(trait_name(trait))] = note;
  }
  doc["personality_notes"] = notes;
  doc["severity"] = severity_to_json(p.severity);
  doc["guidelines"] = p.guidelines;
  doc["reflection_questions"] = p.reflection_questions;
  json trace = json::object();
  for (const auto& [struggle, ref] : p.traceability) {
    if (const int* id = std::get_if<int>(&ref)) {
      trace[struggle] = *id;
    } else {
      trace[struggle] = std::string(extra_feature_name(std::get<ExtraFeature>(ref)));
    }
  }
  doc["traceability"] = trace;
  return doc.dump(2) + "\n";
}

std::string therapist_to_json(const TherapistProfile& t) {
  json doc;
  doc["id"] = t.id;
  doc["preamble"] = t.preamble;
  doc["reflection_questions"] = t.reflection_questions;
  doc["guidelines"] = t.guidelines;
  doc["max_words_guideline"] = t.max_words_guideline;
  return doc.dump(2) + "\n";
}

ClientPromptTemplate load_client_template(const std::filesystem::path& path) {
  json doc = parse_file(path);
  const auto& d = default_client_template();
  ClientPromptTemplate tmpl;
  tmpl.preamble = doc.value("preamble", d.preamble);
  tmpl.reflection_header = doc.value("reflection_header", d.reflection_header);
  tmpl.context_header = doc.value("context_header", d.context_header);
  tmpl.struggles_header = doc.value("struggles_header", d.struggles_header);
  tmpl.personality_header = doc.value("personality_header", d.personality_header);
  tmpl.guidelines_header = doc.value("guidelines_header", d.guidelines_header);
  return tmpl;
}

TherapistPromptTemplate load_therapist_template(const std::filesystem::path& path) {
  json doc = parse_file(path);
  const auto& d = default_therapist_template();
  TherapistPromptTemplate tmpl;
  tmpl.reflection_header = doc.value("reflection_header", d.reflection_header);
  tmpl.guidelines_header = doc.value("guidelines_header", d.guidelines_header);
  return tmpl;
}

}  // namespace therasim::persona
