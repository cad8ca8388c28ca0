#include "therasim/analyst.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "therasim/backend.hpp"
#include "therasim/error.hpp"

namespace therasim::analyst {

std::string_view mode_name(Mode mode) { return mode == Mode::single ? "single" : "multi"; }

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "single") return Mode::single;
  if (name == "multi") return Mode::multi;
  return std::nullopt;
}

const AnalystPromptTemplate& default_analyst_template() {
  static const AnalystPromptTemplate tmpl = {
      "You are a research analyst reviewing the transcript of a single text-based therapy "
      "session between a therapist and a client. Classify the therapeutic approach the "
      "therapist employed and the specific techniques they used. Use only the labels "
      "listed below, exactly as written.",
      "Approaches (choose exactly one):",
      "Techniques:",
      "Reply with exactly two lines and nothing else:\n"
      "APPROACH: <one approach from the list>\n"
      "TECHNIQUES: <technique>[; <technique>; ...]",
      "List exactly one technique: the one most characteristic of the session.",
      "List every technique you observed, separated by semicolons.",
      "Transcript:",
      "Your previous reply did not follow the required format or used labels outside the "
      "provided lists. Reply again with exactly two lines, 'APPROACH: <label>' and "
      "'TECHNIQUES: <label>[; <label>...]', using only labels from the lists.",
  };
  return tmpl;
}

AnalystPromptTemplate load_analyst_template(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(Errc::parse_error, path.string() + ": " + ex.what());
  }
  const auto& d = default_analyst_template();
  AnalystPromptTemplate tmpl;
  tmpl.system_preamble = doc.value("system_preamble", d.system_preamble);
  tmpl.approaches_header = doc.value("approaches_header", d.approaches_header);
  tmpl.techniques_header = doc.value("techniques_header", d.techniques_header);
  tmpl.format_instruction = doc.value("format_instruction", d.format_instruction);
  tmpl.single_mode_instruction = doc.value("single_mode_instruction", d.single_mode_instruction);
  tmpl.multi_mode_instruction = doc.value("multi_mode_instruction", d.multi_mode_instruction);
  tmpl.transcript_header = doc.value("transcript_header", d.transcript_header);
  tmpl.correction_instruction = doc.value("correction_instruction", d.correction_instruction);
  return tmpl;
}

llm::ChatRequest build_annotation_request(const selfplay::Transcript& transcript, Mode mode,
                                          const AnalystPromptTemplate& tmpl) {
  if (!transcript.complete) {
    throw Error(Errc::incomplete_transcript,
                "transcript '" + transcript.session_id + "' is not complete");
  }

  std::ostringstream system;
  system << tmpl.system_preamble << "\n\n" << tmpl.approaches_header << "\n";
  for (const ApproachLabel& a : approach_taxonomy()) {
    if (a.canonical_name == a.full_name) {
      system << "- " << a.canonical_name << "\n";
    } else {
      system << "- " << a.canonical_name << " (" << a.full_name << ")\n";
    }
  }
  system << "\n" << tmpl.techniques_header << "\n";
  for (const TechniqueLabel& t : technique_taxonomy()) {
    system << "- " << t.canonical_name << "\n";
  }
  system << "\n" << tmpl.format_instruction << "\n\n";
  system << (mode == Mode::single ? tmpl.single_mode_instruction : tmpl.multi_mode_instruction);

  std::ostringstream user;
  user << tmpl.transcript_header << "\n";
  for (const selfplay::Turn& turn : transcript.turns) {
    user << (turn.speaker == selfplay::Speaker::therapist ? "Therapist: " : "Client: ")
         << turn.content << "\n";
  }

  llm::ChatRequest request;
  request.messages = {{llm::Role::system, system.str()}, {llm::Role::user, user.str()}};
  request.params = llm::analyst_params();
  request.agent_tag = "analyst";
  request.session_id = transcript.session_id;
  return request;
}

namespace {

std::string trimmed(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

// Matches a "FIELD: value" line, case-insensitive on the field name.
std::optional<std::string> field_value(std::string_view line, std::string_view field) {
  std::string_view rest = line;
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) {
    rest.remove_prefix(1);
  }
  if (rest.size() < field.size()) return std::nullopt;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(rest[i])) !=
        std::tolower(static_cast<unsigned char>(field[i]))) {
      return std::nullopt;
    }
  }
  rest.remove_prefix(field.size());
  // Tolerate a trailing plural: "TECHNIQUE" matches "TECHNIQUES: ...".
  if (!rest.empty() && (rest.front() == 's' || rest.front() == 'S')) {
    rest.remove_prefix(1);
  }
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) {
    rest.remove_prefix(1);
  }
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  rest.remove_prefix(1);
  return trimmed(rest);
}

// Splits a technique list on ';'. When no ';' is present and the whole
// string is not itself a label, falls back to commas outside parentheses.
std::vector<std::string> split_labels(const std::string& value) {
  std::vector<std::string> parts;
  if (value.find(';') != std::string::npos) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
      if (i == value.size() || value[i] == ';') {
        std::string piece = trimmed(std::string_view(value).substr(start, i - start));
        if (!piece.empty()) parts.push_back(std::move(piece));
        start = i + 1;
      }
    }
    return parts;
  }
  if (match_technique(value) || value.find(',') == std::string::npos) {
    std::string piece = trimmed(value);
    if (!piece.empty()) parts.push_back(std::move(piece));
    return parts;
  }
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i < value.size() && value[i] == '(') ++depth;
    if (i < value.size() && value[i] == ')') depth = std::max(0, depth - 1);
    if (i == value.size() || (value[i] == ',' && depth == 0)) {
      std::string piece = trimmed(std::string_view(value).substr(start, i - start));
      if (!piece.empty()) parts.push_back(std::move(piece));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

Annotation parse_annotation(const std::string& raw, Mode mode, const std::string& session_id) {
  if (trimmed(raw).empty()) {
    throw Error(Errc::empty_response, "analyst reply for '" + session_id + "' is empty");
  }

  std::optional<std::string> approach_value;
  std::optional<std::string> techniques_value;
  std::istringstream lines(raw);
  std::string line;
  while (std::getline(lines, line)) {
    if (!approach_value) {
      if (auto v = field_value(line, "APPROACH")) approach_value = *v;
    }
    if (!techniques_value) {
      if (auto v = field_value(line, "TECHNIQUE")) techniques_value = *v;
    }
  }
  if (!approach_value) {
    throw Error(Errc::missing_field, "no APPROACH line in reply for '" + session_id + "'");
  }
  if (!techniques_value) {
    throw Error(Errc::missing_field, "no TECHNIQUES line in reply for '" + session_id + "'");
  }

  Annotation annotation;
  annotation.session_id = session_id;
  annotation.mode = mode;
  annotation.raw_response = raw;

  auto approach = match_approach(*approach_value);
  if (!approach) {
    throw Error(Errc::unknown_approach, "'" + *approach_value + "' is not a recognized approach");
  }
  annotation.approach = *approach;
  if (*approach_value != *approach) annotation.flags.insert(kFlagNormalized);

  const std::vector<std::string> pieces = split_labels(*techniques_value);
  if (pieces.empty()) {
    throw Error(Errc::missing_field, "TECHNIQUES line is empty for '" + session_id + "'");
  }
  for (const std::string& piece : pieces) {
    auto technique = match_technique(piece);
    if (!technique) {
      throw Error(Errc::unknown_technique, "'" + piece + "' is not a recognized technique");
    }
    if (std::find(annotation.techniques.begin(), annotation.techniques.end(), *technique) ==
        annotation.techniques.end()) {
      annotation.techniques.push_back(*technique);
    }
    if (piece != *technique) annotation.flags.insert(kFlagNormalized);
  }

  if (mode == Mode::single && annotation.techniques.size() > 1) {
    annotation.techniques.resize(1);
    annotation.flags.insert(kFlagMultipleGivenInSingleMode);
  }
  return annotation;
}

std::string AnnotateReport::to_text() const {
  std::ostringstream out;
  out << "annotate report\n";
  out << "  annotated: " << annotations.size() << ", failed: " << failures.size()
      << ", retried: " << retried << "\n";
  for (const AnnotationFailure& f : failures) {
    out << "  " << f.session_id << " [" << f.code << "] " << f.message << "\n";
  }
  return out.str();
}

AnnotateReport annotate_batch(const std::vector<selfplay::Transcript>& transcripts,
                              llm::Backend& backend, Mode mode, AnnotationStore& store,
                              const AnnotateOptions& options) {
  AnnotateReport report;
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto annotate_one = [&](const selfplay::Transcript& transcript) {
    llm::ChatRequest request = build_annotation_request(transcript, mode, options.prompt);
    request.params = options.params;
    std::string raw = llm::complete(backend, request).content;
    try {
      return parse_annotation(raw, mode, transcript.session_id);
    } catch (const Error& first_error) {
      switch (first_error.code()) {
        case Errc::unknown_approach:
        case Errc::unknown_technique:
        case Errc::missing_field:
        case Errc::empty_response:
          break;  // retry below with a correction
        default:
          throw;
      }
      {
        std::scoped_lock lock(mu);
        ++report.retried;
      }
      llm::ChatRequest retry = request;
      if (!raw.empty()) retry.messages.push_back({llm::Role::assistant, raw});
      retry.messages.push_back({llm::Role::user, options.prompt.correction_instruction});
      raw = llm::complete(backend, retry).content;
      return parse_annotation(raw, mode, transcript.session_id);
    }
  };

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= transcripts.size()) return;
      const selfplay::Transcript& transcript = transcripts[i];
      try {
        Annotation annotation = annotate_one(transcript);
        store.put(annotation);
        std::scoped_lock lock(mu);
        report.annotations.push_back(std::move(annotation));
      } catch (const Error& e) {
        std::scoped_lock lock(mu);
        report.failures.push_back(
            {transcript.session_id, std::string(errc_name(e.code())), e.what()});
      } catch (const std::exception& e) {
        std::scoped_lock lock(mu);
        report.failures.push_back({transcript.session_id, "IO_ERROR", e.what()});
      }
    }
  };

  const int threads = std::max(1, options.concurrency);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto by_session = [](const auto& a, const auto& b) { return a.session_id < b.session_id; };
  std::sort(report.annotations.begin(), report.annotations.end(), by_session);
  std::sort(report.failures.begin(), report.failures.end(), by_session);
  return report;
}

}  // namespace therasim::analyst
