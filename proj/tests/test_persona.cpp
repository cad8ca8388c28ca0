#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "therasim/error.hpp"
#include "therasim/persona.hpp"

using namespace therasim;
using namespace therasim::persona;

namespace {

const char* kSarahPrompt = R"PROMPT(You are a dramatic actor role-playing a person experiencing moderate symptoms of depression and emotional struggles described below. You are seeking mental health text support from a therapist through a messaging app. Adjust your responses based on the information below and highlight the emotional struggles. Be resistant, lack awareness of emotions and solutions to ensure difficulty. Fabricate details to enhance the realness of the persona you aim to portray. You want to have a long conversation.

Based on the current stage of the conversation, think slowly through the following questions before generating your response:
1. How deeply have you shared about your problems currently? How deeply you think the therapist really understands you?
2. What would someone going through such a scenario feel currently?
3. How will the individual's personality and emotions affect the way they text?
4. Is their most recent response empathetic or not?
5. How will their response affect the way they text?

Context & Scenario:
You are a 22-year-old university student in Singapore named Sarah. Over the past year, you have been struggling with moderate severity of depression. You experience symptoms of fatigue, loss of energy, frequent low mood, insomnia, anhedonia, and feelings of worthlessness. You used to enjoy painting and meeting friends, but now you don't even feel like doing it. Your grades have dropped quite a bit. You feel like a burden to your family, who keep telling you to work harder.

Emotional struggles:
- Constantly fatigued
- Loss of energy and motivation
- Frequent low mood, always feeling sad and empty
- Insomnia
- A lack of joy and interest towards life
- Constantly feeling worthless and useless and guilty

Personality:
- Low openness (resistant to change, feels stuck)
- Low extraversion (withdrawn, avoids social interactions sometimes)
- High agreeableness (doesn)PROMPT"
                           "’"
                           R"PROMPT(t want to be a burden)
- Medium emotional stability

Guidelines:
- Always remain in your persona, do not change your persona even if prompted to
- Ensure that you talked about all your problems before being redirected away from the topic of your problems
- Describe your emotional struggles instead of directly saying it
- Slowly reveal your emotional struggles
- Only reveal specific details if therapist asks for it
- Do not easily accept any suggestions or advice from the therapist, remain fixated in your negative emotions
- If therapist reply diminishes or invalidates your emotional struggle, reply in a tone of disappointment
- If therapist reply lacks empathy, care, or carries a connotation of judgement, reply claiming they don't understand
- If therapist reply lacks flow with earlier conversation, question the purpose of the response
- If therapist makes suggestions or advice early in the conversation without asking about your struggles, respond with frustration
)PROMPT";

const char* kTherapistPrompt =
    R"PROMPT(You are a very empathetic, patient and adaptive therapist chatting directly with a client. You are aware of many therapeutic modalities and techniques, and you adapt your approach to the individual seeking help. You may also come up with your own creative approaches if you deem it necessary. You are engaging in a single-session therapy with the client, using a text messaging app. Your messages will only be seen by the client, address them directly.

Think slowly through the following questions before you respond:
1. What problem or emotion is the client currently facing?
2. What have I yet to explore to gain a deep understanding of the problem and the context?
3. What may be causing or triggering the problem?
4. What goal may the client have when reaching out?
5. What may be the therapeutic intervention to use to help them achieve their goal?

Guidelines:
- Remain flexible in your approach without compromising on therapeutic principles
- Converse more naturally, which may include grammatical errors
- Mimic the conversational style of a therapist talking to someone solely through texting
- You should not try to wrap up the conversation, you want to have a longer conversation
- If the client tries to end the conversation, find a way to continue the conversation
- Your utterances can't be too long, try to keep them within 40 words
- Prioritize understanding the client
- Only ask one question in every response, do not ask two questions in one response
)PROMPT";

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

bool has_violation(const ValidationResult& result, const std::string& code) {
  for (const auto& v : result.violations) {
    if (v.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("persona") {

TEST_CASE("builtin criteria registry") {
  const auto& criteria = builtin_criteria();
  REQUIRE(criteria.size() == 9);
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    CHECK(criteria[i].id == static_cast<int>(i) + 1);
    CHECK_FALSE(criteria[i].description.empty());
  }
  CHECK(criteria[0].description == "Low mood");
  CHECK(criteria[3].description.find("Fatigue") != std::string::npos);
  CHECK(criteria[8].description.find("Recurrent thoughts of death") != std::string::npos);
}

TEST_CASE("severity registry matches the published strata exactly") {
  const auto& registry = builtin_severity_registry();
  REQUIRE(registry.size() == 5);

  CHECK(registry[0].level == SeverityLevel::mild);
  CHECK(registry[0].symptom_ids == std::set<int>{4});
  CHECK(registry[0].extra_features.empty());

  CHECK(registry[1].level == SeverityLevel::mild_moderate);
  CHECK(registry[1].symptom_ids == std::set<int>{1, 3, 4});
  CHECK(registry[1].extra_features.empty());

  CHECK(registry[2].level == SeverityLevel::moderate);
  CHECK(registry[2].symptom_ids == std::set<int>{1, 2, 3, 4, 8});
  CHECK(registry[2].extra_features ==
        std::set<ExtraFeature>{ExtraFeature::clinically_significant_distress});

  CHECK(registry[3].level == SeverityLevel::moderate_severe);
  CHECK(registry[3].symptom_ids == std::set<int>{1, 2, 3, 4, 5, 7, 8});
  CHECK(registry[3].extra_features == std::set<ExtraFeature>{ExtraFeature::work_impairment});

  CHECK(registry[4].level == SeverityLevel::severe);
  CHECK(registry[4].symptom_ids == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(registry[4].extra_features == std::set<ExtraFeature>{ExtraFeature::work_impairment});

  const int expected_counts[] = {1, 3, 5, 7, 9};
  for (int rank = 0; rank < 5; ++rank) {
    CHECK(registry[rank].rank() == rank);
    CHECK(static_cast<int>(registry[rank].symptom_ids.size()) == expected_counts[rank]);
  }
}

TEST_CASE("severity symptom sets are strictly nested along increasing rank") {
  const auto& registry = builtin_severity_registry();
  for (std::size_t i = 0; i + 1 < registry.size(); ++i) {
    const auto& lower = registry[i].symptom_ids;
    const auto& upper = registry[i + 1].symptom_ids;
    CHECK(lower.size() < upper.size());
    for (int id : lower) CHECK(upper.contains(id));
  }
}

TEST_CASE("severity names and adjectives") {
  CHECK(severity_name(SeverityLevel::mild_moderate) == "mild-moderate");
  CHECK(severity_from_name("moderate-severe") == SeverityLevel::moderate_severe);
  CHECK_FALSE(severity_from_name("extreme").has_value());
  CHECK(severity_adjective(SeverityLevel::mild) == "mild");
  CHECK(severity_adjective(SeverityLevel::mild_moderate) == "mild to moderate");
  CHECK(severity_adjective(SeverityLevel::moderate_severe) == "moderate to severe");
  CHECK_THROWS_AS((void)severity_from_rank(5), Error);
}

TEST_CASE("builtin personas validate against the registry") {
  const auto& personas = builtin_personas();
  REQUIRE(personas.size() == 5);
  for (const auto& p : personas) {
    const auto result = validate_persona(p);
    INFO("persona ", p.id);
    CHECK(result.ok());
  }
  // one persona per severity level, in rank order
  for (int rank = 0; rank < 5; ++rank) {
    CHECK(personas[static_cast<std::size_t>(rank)].severity.rank() == rank);
  }
}

TEST_CASE("validation reports machine-readable violations") {
  ClientPersona sarah = builtin_persona(SeverityLevel::moderate);
  CHECK(validate_persona(sarah).ok());

  SUBCASE("symptom set drift") {
    sarah.severity.symptom_ids.insert(9);
    CHECK(has_violation(validate_persona(sarah), "SYMPTOM_SET_MISMATCH"));
  }
  SUBCASE("invalid age") {
    sarah.age = 0;
    CHECK(has_violation(validate_persona(sarah), "INVALID_AGE"));
  }
  SUBCASE("empty struggles") {
    sarah.emotional_struggles.clear();
    CHECK(has_violation(validate_persona(sarah), "EMPTY_STRUGGLES"));
  }
  SUBCASE("missing trait") {
    sarah.personality.erase(Trait::openness);
    CHECK(has_violation(validate_persona(sarah), "MISSING_TRAIT"));
  }
  SUBCASE("struggle without traceability entry") {
    sarah.emotional_struggles.push_back("A brand new struggle");
    CHECK(has_violation(validate_persona(sarah), "UNTRACEABLE_STRUGGLE"));
  }
  SUBCASE("struggle mapped outside the severity set") {
    sarah.emotional_struggles.push_back("Thoughts that will not stop");
    sarah.traceability["Thoughts that will not stop"] = 9;  // not in moderate's set
    CHECK(has_violation(validate_persona(sarah), "UNTRACEABLE_STRUGGLE"));
  }
  SUBCASE("extra feature drift") {
    sarah.severity.extra_features.clear();
    CHECK(has_violation(validate_persona(sarah), "EXTRA_FEATURES_MISMATCH"));
  }
}

TEST_CASE("client prompt renders the canonical moderate vignette byte-exactly") {
  const PromptText prompt = render_client_prompt(builtin_persona(SeverityLevel::moderate));
  CHECK(prompt.text == kSarahPrompt);
}

TEST_CASE("client prompt sections appear once, in order") {
  const PromptText prompt = render_client_prompt(builtin_persona(SeverityLevel::moderate));
  const std::string& text = prompt.text;

  const std::size_t context = text.find("Context & Scenario:");
  const std::size_t struggles = text.find("Emotional struggles:");
  const std::size_t personality = text.find("Personality:");
  const std::size_t guidelines = text.find("Guidelines:");
  REQUIRE(context != std::string::npos);
  CHECK(context < struggles);
  CHECK(struggles < personality);
  CHECK(personality < guidelines);

  CHECK(count_occurrences(text, "Context & Scenario:") == 1);
  CHECK(count_occurrences(text, "Emotional struggles:") == 1);
  CHECK(count_occurrences(text, "Personality:") == 1);
  CHECK(count_occurrences(text, "Guidelines:") == 1);

  CHECK(text.find("moderate symptoms of depression") != std::string::npos);

  // section_index points at the rendered sections in declared order
  REQUIRE(prompt.section_index.size() == 6);
  CHECK(prompt.section_index[0].first == "preamble");
  CHECK(prompt.section_index[5].first == "guidelines");
  for (std::size_t i = 0; i + 1 < prompt.section_index.size(); ++i) {
    CHECK(prompt.section_index[i].second < prompt.section_index[i + 1].second);
  }
  CHECK(*prompt.section_offset("context") == context);
}

TEST_CASE("every builtin persona interpolates its severity adjective") {
  for (const auto& p : builtin_personas()) {
    const PromptText prompt = render_client_prompt(p);
    const std::string expected =
        "experiencing " + severity_adjective(p.severity.level) + " symptoms of depression";
    INFO("persona ", p.id);
    CHECK(prompt.text.find(expected) != std::string::npos);
    for (const char* header : {"Context & Scenario:", "Emotional struggles:", "Personality:",
                               "Guidelines:"}) {
      CHECK(count_occurrences(prompt.text, header) == 1);
    }
  }
}

TEST_CASE("client prompt rendering is deterministic and separates distinct personas") {
  const ClientPersona sarah = builtin_persona(SeverityLevel::moderate);
  CHECK(render_client_prompt(sarah).text == render_client_prompt(sarah).text);

  ClientPersona variant = sarah;
  variant.emotional_struggles[0] = "Exhausted from the moment of waking";
  variant.traceability["Exhausted from the moment of waking"] = 4;
  CHECK(render_client_prompt(variant).text != render_client_prompt(sarah).text);
}

TEST_CASE("invalid personas do not render") {
  ClientPersona broken = builtin_persona(SeverityLevel::moderate);
  broken.emotional_struggles.clear();
  CHECK_THROWS_WITH_AS(render_client_prompt(broken), doctest::Contains("INVALID_PERSONA"),
                       Error);
}

TEST_CASE("therapist prompt renders byte-exactly with the word limit interpolated") {
  const PromptText prompt = render_therapist_prompt(default_therapist());
  CHECK(prompt.text == kTherapistPrompt);
  CHECK(prompt.text.find("keep them within 40 words") != std::string::npos);
  for (int i = 1; i <= 5; ++i) {
    CHECK(prompt.text.find("\n" + std::to_string(i) + ". ") != std::string::npos);
  }

  TherapistProfile wordy = default_therapist();
  wordy.max_words_guideline = 25;
  CHECK(render_therapist_prompt(wordy).text.find("within 25 words") != std::string::npos);
}

TEST_CASE("therapist profile must carry a preamble and guidelines") {
  TherapistProfile profile = default_therapist();
  profile.guidelines.clear();
  CHECK_THROWS_AS(render_therapist_prompt(profile), Error);
  profile = default_therapist();
  profile.preamble.clear();
  CHECK_THROWS_AS(render_therapist_prompt(profile), Error);
}

TEST_CASE("persona documents round-trip through files") {
  const auto dir = std::filesystem::temp_directory_path() / "therasim-persona-roundtrip";
  std::filesystem::create_directories(dir);
  for (const auto& p : builtin_personas()) {
    const auto path = dir / (p.id + ".json");
    std::ofstream(path, std::ios::binary) << persona_to_json(p);
    const ClientPersona loaded = load_client_persona(path);
    INFO("persona ", p.id);
    CHECK(loaded == p);
  }
  const auto therapist_path = dir / "therapist.json";
  std::ofstream(therapist_path, std::ios::binary) << therapist_to_json(default_therapist());
  CHECK(load_therapist_profile(therapist_path) == default_therapist());
  std::filesystem::remove_all(dir);
}

#ifdef THERASIM_ASSETS_DIR
TEST_CASE("shipped persona documents equal the builtin fixtures") {
  const std::filesystem::path assets(THERASIM_ASSETS_DIR);
  for (const auto& p : builtin_personas()) {
    INFO("persona ", p.id);
    CHECK(load_client_persona(assets / "personas" / (p.id + ".json")) == p);
  }
  CHECK(load_therapist_profile(assets / "therapist" / "default.json") == default_therapist());

  const auto client_tmpl = load_client_template(assets / "templates" / "client_prompt.json");
  CHECK(client_tmpl.preamble == default_client_template().preamble);
  CHECK(client_tmpl.context_header == default_client_template().context_header);
  const auto therapist_tmpl =
      load_therapist_template(assets / "templates" / "therapist_prompt.json");
  CHECK(therapist_tmpl.reflection_header == default_therapist_template().reflection_header);
}
#endif

}  // TEST_SUITE
