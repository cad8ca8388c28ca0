#include <cctype>
#include <map>
#include <stdexcept>

#include "therasim/analyst.hpp"

namespace therasim::analyst {

const std::vector<ApproachLabel>& approach_taxonomy() {
  static const std::vector<ApproachLabel> approaches = {
      {"ACT", "Acceptance and Commitment Therapy",
       "Mindfulness, values-based decision-making, defusion from negative thoughts",
       "Encouraging acceptance rather than control, using metaphors to reframe distress "
       "(e.g., \"Thoughts are like passing clouds.\")"},
      {"CBT", "Cognitive-Behavioral Therapy",
       "Identifying cognitive distortions, structured problem-solving, goal-setting",
       "Challenging irrational thoughts, suggesting behavior experiments, promoting "
       "cognitive reframing"},
      {"DBT", "Dialectical Behavior Therapy",
       "Emotional regulation, distress tolerance, mindfulness, validation plus challenge",
       "Teaching coping strategies, balancing validation with encouraging change"},
      {"CTRT", "Choice Theory & Reality Therapy",
       "Focus on personal responsibility, meeting psychological needs, present-focused "
       "problem-solving",
       "Encouraging self-evaluation (\"Is what you're doing helping you get what you "
       "want?\"), emphasizing choices and agency, guiding toward realistic action steps"},
      {"Existential Therapy", "Existential Therapy",
       "Exploring meaning, existential anxiety, freedom and responsibility",
       "Discussing purpose, encouraging meaning-making, engaging with existential fears "
       "about life and death"},
      {"IPT", "Interpersonal Therapy",
       "Improving communication, addressing relationship conflicts, grief, or life "
       "transitions",
       "Asking about social support, exploring past and present relationships, helping "
       "navigate conflicts"},
      {"MI", "Motivational Interviewing",
       "Helping clients resolve ambivalence, open-ended questions, reinforcing change "
       "talk, often involves open questions, affirmation, reflections, and summaries "
       "(OARS)",
       "Asking questions like \"What would change if you took this step?\", amplifying "
       "the client’s own motivation"},
      {"Narrative Therapy", "Narrative Therapy",
       "Viewing identity through personal stories, externalizing problems",
       "Reframing distress as a separate entity (e.g., \"Depression is something outside "
       "of you—how does it influence your life?\")"},
      {"PCT", "Person-Centered Therapy",
       "Empathy, unconditional positive regard, non-directive support",
       "Frequent validation, reflective listening, avoiding advice-giving, encouraging "
       "self-exploration"},
      {"Psychodynamic Therapy", "Psychodynamic Therapy",
       "Uncovering unconscious conflicts, exploring early life experiences, transference "
       "analysis",
       "Asking about childhood patterns, linking past experiences to current emotions, "
       "interpreting unconscious motivations"},
      {"Schema Therapy", "Schema Therapy",
       "Identifying deep-rooted schemas (e.g., abandonment, defectiveness), reworking "
       "maladaptive patterns",
       "Recognizing recurring negative life themes, using limited reparenting or imagery "
       "rescripting"},
      {"SFBT", "Solution-Focused Brief Therapy",
       "Focusing on solutions rather than problems, scaling questions, miracle question",
       "Asking \"What small step could you take today?\" or \"If things got better "
       "overnight, what would be different?\""},
  };
  return approaches;
}

const std::vector<TechniqueLabel>& technique_taxonomy() {
  static const std::vector<TechniqueLabel> techniques = {
      {"goal setting", {"SFBT", "CBT"}},
      {"miracle question", {"SFBT"}},
      {"exception finding questions", {"SFBT"}},
      {"scaling questions", {"SFBT"}},
      {"coping question", {"SFBT"}},
      {"compliments", {"SFBT"}},
      {"reframing the problem in positive ways", {"SFBT"}},
      {"cognitive restructuring / challenging thoughts", {"CBT"}},
      {"interoceptive exposure", {"CBT"}},
      {"exposure and response prevention", {"CBT"}},
      {"progressive muscle relaxation", {"CBT"}},
      {"behavioral activation", {"CBT"}},
      {"de-catastrophizing", {"CBT"}},
      {"mood monitoring", {"CBT"}},
      {"open questions", {"MI"}},
      {"affirmations", {"MI"}},
      {"reflective listening", {"MI"}},
      {"summary reflections", {"MI"}},
      {"eliciting change talk", {"MI"}},
      {"readiness ruler", {"MI"}},
      {"enhancing self-efficacy / confidence", {"MI"}},
  };
  return techniques;
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  int paren_depth = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '(') {
      ++paren_depth;
      continue;
    }
    if (c == ')') {
      if (paren_depth > 0) --paren_depth;
      continue;
    }
    if (paren_depth > 0) continue;

    if (c == '&') {
      out += " and ";
    } else if (c == '-' || c == '_') {
      out += ' ';
    } else if (c == '/') {
      out += " / ";
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }

  // Collapse whitespace runs and trim.
  std::string collapsed;
  collapsed.reserve(out.size());
  bool pending_space = false;
  for (char c : out) {
    if (c == ' ') {
      pending_space = !collapsed.empty();
    } else {
      if (pending_space) collapsed += ' ';
      pending_space = false;
      collapsed += c;
    }
  }
  return collapsed;
}

namespace {

const std::map<std::string, std::string>& approach_alias_index() {
  static const std::map<std::string, std::string> index = [] {
    std::map<std::string, std::string> m;
    auto add = [&m](std::string_view alias, const std::string& canonical) {
      const std::string key = normalize_label(alias);
      auto [it, inserted] = m.emplace(key, canonical);
      if (!inserted && it->second != canonical) {
        throw std::logic_error("approach alias collision: " + key);
      }
    };
    for (const ApproachLabel& a : approach_taxonomy()) {
      add(a.canonical_name, a.canonical_name);
      add(a.full_name, a.canonical_name);
    }
    return m;
  }();
  return index;
}

const std::map<std::string, std::string>& technique_alias_index() {
  static const std::map<std::string, std::string> index = [] {
    std::map<std::string, std::string> m;
    for (const TechniqueLabel& t : technique_taxonomy()) {
      const std::string key = normalize_label(t.canonical_name);
      auto [it, inserted] = m.emplace(key, t.canonical_name);
      if (!inserted) {
        throw std::logic_error("technique alias collision: " + key);
      }
    }
    return m;
  }();
  return index;
}

}  // namespace

std::optional<std::string> match_approach(std::string_view raw) {
  const auto& index = approach_alias_index();
  auto it = index.find(normalize_label(raw));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> match_technique(std::string_view raw) {
  const auto& index = technique_alias_index();
  auto it = index.find(normalize_label(raw));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

}  // namespace therasim::analyst
