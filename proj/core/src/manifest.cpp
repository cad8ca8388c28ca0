#include <fstream>
#include <sstream>

#include <json.hpp>

#include "therasim/error.hpp"
#include "therasim/workbench.hpp"

namespace therasim::workbench {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_with_location(const std::filesystem::path& path, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    std::size_t line = 1;
    const std::size_t limit = std::min(ex.byte, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw Error(Errc::parse_error,
                path.string() + ":" + std::to_string(line) + ": " + ex.what());
  }
}

void reject_unknown_fields(const json& doc, const std::set<std::string>& known,
                           const std::filesystem::path& path, const std::string& scope) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      throw Error(Errc::unknown_field, path.string() + ": unknown field '" + scope + key + "'");
    }
  }
}

int positive_int(const json& doc, const std::string& field, int fallback,
                 const std::filesystem::path& path) {
  if (!doc.contains(field)) return fallback;
  const json& value = doc.at(field);
  if (!value.is_number_integer() || value.get<int>() < 1) {
    throw Error(Errc::invalid_value,
                path.string() + ": field '" + field + "' must be a positive integer");
  }
  return value.get<int>();
}

}  // namespace

selfplay::RunManifest load_manifest(const std::filesystem::path& path) {
  const json doc = parse_with_location(path, slurp(path));
  if (!doc.is_object()) {
    throw Error(Errc::parse_error, path.string() + ": manifest must be a JSON object");
  }
  reject_unknown_fields(doc,
                        {"personas", "therapist", "sessions_per_persona", "turns_per_agent",
                         "opener", "params", "concurrency_limit", "session_retries",
                         "output_dir"},
                        path, "");

  selfplay::RunManifest manifest;
  const auto base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  if (!doc.contains("personas") || !doc.at("personas").is_array() || doc.at("personas").empty()) {
    throw Error(Errc::invalid_value,
                path.string() + ": field 'personas' must be a non-empty array");
  }
  for (const auto& entry : doc.at("personas")) {
    if (!entry.is_string()) {
      throw Error(Errc::invalid_value,
                  path.string() + ": persona entries must be level names or file paths");
    }
    const std::string ref = entry.get<std::string>();
    if (auto level = persona::severity_from_name(ref)) {
      manifest.personas.push_back(persona::builtin_persona(*level));
    } else {
      manifest.personas.push_back(persona::load_client_persona(base_dir / ref));
    }
  }

  if (doc.contains("therapist")) {
    manifest.therapist =
        persona::load_therapist_profile(base_dir / doc.at("therapist").get<std::string>());
  }

  manifest.sessions_per_persona = positive_int(doc, "sessions_per_persona", 100, path);
  manifest.turns_per_agent = positive_int(doc, "turns_per_agent", 10, path);
  manifest.concurrency_limit = positive_int(doc, "concurrency_limit", 1, path);

  if (doc.contains("session_retries")) {
    const json& value = doc.at("session_retries");
    if (!value.is_number_integer() || value.get<int>() < 0) {
      throw Error(Errc::invalid_value,
                  path.string() + ": field 'session_retries' must be a non-negative integer");
    }
    manifest.session_retries = value.get<int>();
  }

  if (doc.contains("opener")) {
    const json& opener = doc.at("opener");
    if (opener.is_null()) {
      manifest.opener.reset();  // generated opener
    } else if (opener.is_string() && !opener.get<std::string>().empty()) {
      manifest.opener = opener.get<std::string>();
    } else {
      throw Error(Errc::invalid_value,
                  path.string() + ": field 'opener' must be a non-empty string or null");
    }
  }

  if (doc.contains("params")) {
    const json& params = doc.at("params");
    if (!params.is_object()) {
      throw Error(Errc::invalid_value, path.string() + ": field 'params' must be an object");
    }
    reject_unknown_fields(params, {"model", "temperature", "max_tokens", "top_p"}, path,
                          "params.");
    manifest.params.model_name = params.value("model", manifest.params.model_name);
    manifest.params.temperature = params.value("temperature", manifest.params.temperature);
    manifest.params.max_tokens = params.value("max_tokens", manifest.params.max_tokens);
    manifest.params.top_p = params.value("top_p", manifest.params.top_p);
    if (manifest.params.temperature < 0.0 || manifest.params.max_tokens < 1 ||
        !(manifest.params.top_p > 0.0 && manifest.params.top_p <= 1.0)) {
      throw Error(Errc::invalid_value, path.string() + ": invalid generation params");
    }
  }

  if (doc.contains("output_dir")) {
    manifest.output_dir = base_dir / doc.at("output_dir").get<std::string>();
  }

  for (const auto& p : manifest.personas) {
    auto validation = persona::validate_persona(p);
    if (!validation.ok()) {
      throw Error(Errc::invalid_value,
                  path.string() + ": persona '" + p.id + "' fails validation (" +
                      validation.violations.front().code + ")");
    }
  }
  return manifest;
}

llm::ScriptedBackend::Script load_script(const std::filesystem::path& path) {
  const json doc = parse_with_location(path, slurp(path));
  if (!doc.is_object()) {
    throw Error(Errc::parse_error, path.string() + ": script must be a JSON object");
  }
  llm::ScriptedBackend::Script script;
  for (const auto& [tag, replies] : doc.items()) {
    if (!replies.is_array()) {
      throw Error(Errc::invalid_value,
                  path.string() + ": stream '" + tag + "' must be an array of strings");
    }
    std::vector<std::string> list;
    for (const auto& reply : replies) {
      if (!reply.is_string()) {
        throw Error(Errc::invalid_value,
                    path.string() + ": stream '" + tag + "' must be an array of strings");
      }
      list.push_back(reply.get<std::string>());
    }
    script[tag] = std::move(list);
  }
  return script;
}

}  // namespace therasim::workbench
