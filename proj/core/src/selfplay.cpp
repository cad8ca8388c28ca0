#include "therasim/selfplay.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

#include "therasim/backend.hpp"
#include "therasim/error.hpp"

namespace therasim::selfplay {

std::string_view speaker_name(Speaker speaker) {
  return speaker == Speaker::therapist ? "therapist" : "client";
}

std::optional<Speaker> speaker_from_name(std::string_view name) {
  if (name == "therapist") return Speaker::therapist;
  if (name == "client") return Speaker::client;
  return std::nullopt;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::string make_session_id(const std::string& persona_id, int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", ordinal);
  return persona_id + "-" + buf;
}

std::vector<llm::ChatMessage> agent_view(const Transcript& transcript, Speaker agent,
                                         const persona::PromptText& system_prompt) {
  std::vector<llm::ChatMessage> messages;
  messages.reserve(transcript.turns.size() + 1);
  messages.push_back({llm::Role::system, system_prompt.text});
  for (const Turn& turn : transcript.turns) {
    const llm::Role role = turn.speaker == agent ? llm::Role::assistant : llm::Role::user;
    messages.push_back({role, turn.content});
  }
  return messages;
}

namespace {

std::string generate_turn(llm::Backend& backend, const Transcript& transcript, Speaker agent,
                          const persona::PromptText& prompt, const SessionConfig& config) {
  llm::ChatRequest request;
  request.messages = agent_view(transcript, agent, prompt);
  request.params = config.params;
  request.agent_tag = std::string(speaker_name(agent));
  request.session_id = transcript.session_id;
  try {
    llm::ChatMessage reply = llm::complete(backend, request);
    if (reply.content.empty()) {
      throw Error(Errc::empty_completion, "backend returned an empty message");
    }
    return reply.content;
  } catch (const Error& e) {
    throw Error(e.code(), "session " + transcript.session_id + " turn " +
                              std::to_string(transcript.turns.size()) + ": " + e.what());
  }
}

}  // namespace

Transcript run_session(const SessionConfig& config, llm::Backend& backend) {
  if (config.turns_per_agent < 1) {
    throw Error(Errc::invalid_turns,
                "turns_per_agent must be >= 1, got " + std::to_string(config.turns_per_agent));
  }
  persona::ValidationResult validation = persona::validate_persona(config.persona);
  if (!validation.ok()) {
    throw Error(Errc::invalid_persona,
                "persona '" + config.persona.id + "' failed validation (" +
                    validation.violations.front().code + ")");
  }

  Transcript transcript;
  transcript.session_id =
      config.session_id.empty() ? make_session_id(config.persona.id, 1) : config.session_id;
  transcript.persona_id = config.persona.id;
  transcript.severity_rank = config.persona.severity.rank();
  transcript.params = config.params;
  transcript.opener_mode = config.opener.has_value() ? OpenerMode::fixed : OpenerMode::generated;
  transcript.created_at = config.created_at.empty() ? utc_now_iso8601() : config.created_at;

  const persona::PromptText therapist_prompt = persona::render_therapist_prompt(config.therapist);
  const persona::PromptText client_prompt = persona::render_client_prompt(config.persona);

  const int total_turns = 2 * config.turns_per_agent;
  while (static_cast<int>(transcript.turns.size()) < total_turns) {
    const int index = static_cast<int>(transcript.turns.size());
    const Speaker speaker = index % 2 == 0 ? Speaker::therapist : Speaker::client;
    std::string content;
    if (index == 0 && config.opener.has_value()) {
      content = *config.opener;
    } else {
      const persona::PromptText& prompt =
          speaker == Speaker::therapist ? therapist_prompt : client_prompt;
      content = generate_turn(backend, transcript, speaker, prompt, config);
    }
    transcript.turns.push_back({index, speaker, std::move(content)});
  }
  transcript.complete = true;
  return transcript;
}

WordStats therapist_word_stats(const Transcript& transcript, int limit) {
  WordStats stats;
  long long total_words = 0;
  int therapist_turns = 0;
  for (const Turn& turn : transcript.turns) {
    if (turn.speaker != Speaker::therapist) continue;
    ++therapist_turns;
    int words = 0;
    bool in_word = false;
    for (unsigned char c : turn.content) {
      if (std::isspace(c)) {
        in_word = false;
      } else if (!in_word) {
        in_word = true;
        ++words;
      }
    }
    total_words += words;
    stats.max_words = std::max(stats.max_words, words);
    if (words > limit) ++stats.violations;
  }
  stats.mean_words =
      therapist_turns == 0 ? 0.0 : static_cast<double>(total_words) / therapist_turns;
  return stats;
}

std::string BatchSummary::to_text() const {
  std::ostringstream out;
  out << "batch summary\n";
  out << "  sessions: " << total() << " (completed " << completed << ", failed " << failed
      << ", skipped " << skipped << ")\n";
  for (const PersonaCounts& c : per_persona) {
    out << "  " << c.persona_id << ": completed " << c.completed << ", failed " << c.failed
        << ", skipped " << c.skipped << "\n";
  }
  if (!failures.empty()) {
    out << "  failures:\n";
    for (const SessionFailure& f : failures) {
      out << "    " << f.session_id << " [" << f.code << "] " << f.message << "\n";
    }
  }
  return out.str();
}

BatchSummary run_batch(const RunManifest& manifest, llm::Backend& backend,
                       TranscriptStore& store, ClockFn clock) {
  if (manifest.personas.empty()) {
    throw Error(Errc::invalid_value, "manifest has no personas");
  }
  if (manifest.sessions_per_persona < 1) {
    throw Error(Errc::invalid_value, "sessions_per_persona must be >= 1");
  }
  if (!clock) clock = utc_now_iso8601;

  struct Task {
    std::size_t persona_index;
    int ordinal;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < manifest.personas.size(); ++p) {
    for (int s = 1; s <= manifest.sessions_per_persona; ++s) {
      tasks.push_back({p, s});
    }
  }

  BatchSummary summary;
  summary.per_persona.resize(manifest.personas.size());
  for (std::size_t p = 0; p < manifest.personas.size(); ++p) {
    summary.per_persona[p].persona_id = manifest.personas[p].id;
  }

  std::mutex summary_mu;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const persona::ClientPersona& who = manifest.personas[task.persona_index];
      const std::string session_id = make_session_id(who.id, task.ordinal);

      if (store.contains(session_id)) {
        std::scoped_lock lock(summary_mu);
        ++summary.per_persona[task.persona_index].skipped;
        ++summary.skipped;
        continue;
      }

      SessionConfig config;
      config.persona = who;
      config.therapist = manifest.therapist;
      config.turns_per_agent = manifest.turns_per_agent;
      config.opener = manifest.opener;
      config.params = manifest.params;
      config.session_id = session_id;
      config.created_at = clock();

      bool done = false;
      std::string code = "UNKNOWN";
      std::string message;
      for (int attempt = 0; attempt <= manifest.session_retries && !done; ++attempt) {
        try {
          Transcript transcript = run_session(config, backend);
          store.put(transcript);
          done = true;
        } catch (const Error& e) {
          code = std::string(errc_name(e.code()));
          message = e.what();
        } catch (const std::exception& e) {
          code = "IO_ERROR";
          message = e.what();
        }
      }

      std::scoped_lock lock(summary_mu);
      if (done) {
        ++summary.per_persona[task.persona_index].completed;
        ++summary.completed;
      } else {
        ++summary.per_persona[task.persona_index].failed;
        ++summary.failed;
        summary.failures.push_back({session_id, code, message});
      }
    }
  };

  const int threads = std::max(1, manifest.concurrency_limit);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const SessionFailure& a, const SessionFailure& b) {
              return a.session_id < b.session_id;
            });
  return summary;
}

}  // namespace therasim::selfplay
