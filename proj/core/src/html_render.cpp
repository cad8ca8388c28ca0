#include <sstream>

#include "therasim/workbench.hpp"

namespace therasim::workbench {

namespace {

std::string html_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kStyle = R"(
  body { margin: 0; background: #eef1f5; font-family: sans-serif; }
  header { background: #2b3a55; color: #fff; padding: 16px 24px; }
  header h1 { margin: 0 0 4px; font-size: 18px; }
  header p { margin: 0; font-size: 13px; opacity: 0.85; }
  .thread { max-width: 720px; margin: 24px auto; padding: 0 16px; }
  .msg { margin: 10px 0; display: flex; }
  .msg .bubble { max-width: 75%; padding: 10px 14px; border-radius: 14px;
                 font-size: 14px; line-height: 1.45; white-space: pre-wrap; }
  .msg .who { display: block; font-size: 11px; opacity: 0.6; margin-bottom: 2px; }
  .therapist { justify-content: flex-start; }
  .therapist .bubble { background: #ffffff; border: 1px solid #d7dce3; }
  .client { justify-content: flex-end; }
  .client .bubble { background: #3c6df0; color: #fff; }
  footer { text-align: center; font-size: 11px; color: #8a8f98; margin: 24px 0; }
)";

}  // namespace

std::string render_transcript_html(const selfplay::Transcript& transcript,
                                   const std::string& persona_summary) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>" << html_escape(transcript.session_id) << "</title>\n"
      << "<style>" << kStyle << "</style>\n</head>\n<body>\n";
  out << "<header>\n<h1>Session " << html_escape(transcript.session_id) << "</h1>\n<p>"
      << html_escape(persona_summary) << "</p>\n</header>\n";
  out << "<main class=\"thread\">\n";
  for (const auto& turn : transcript.turns) {
    const bool therapist = turn.speaker == selfplay::Speaker::therapist;
    out << "<div class=\"msg " << (therapist ? "therapist" : "client") << "\">"
        << "<div class=\"bubble\"><span class=\"who\">"
        << (therapist ? "Therapist" : "Client") << "</span>" << html_escape(turn.content)
        << "</div></div>\n";
  }
  out << "</main>\n<footer>" << html_escape(transcript.created_at)
      << (transcript.complete ? "" : " &middot; incomplete") << "</footer>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace therasim::workbench
