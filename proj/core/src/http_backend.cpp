#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "therasim/error.hpp"
#include "therasim/http_backend.hpp"

namespace therasim::llm {

namespace {

using nlohmann::json;

bool transient_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string request_body(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", std::string(role_name(m.role))}, {"content", m.content}});
  }
  json body = {
      {"model", request.params.model_name},
      {"messages", messages},
      {"temperature", request.params.temperature},
      {"max_tokens", request.params.max_tokens},
      {"top_p", request.params.top_p},
  };
  return body.dump();
}

std::string first_choice_content(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& ex) {
    throw Error(Errc::permanent, std::string("unparseable completion response: ") + ex.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw Error(Errc::permanent, "completion response has no choices");
  }
  const json& message = doc["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw Error(Errc::permanent, "completion response has no message content");
  }
  return message["content"].get<std::string>();
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      limiter_(config_.retry.rate_limit_max_requests, config_.retry.rate_limit_window) {
  if (!config_.sleep_fn) {
    config_.sleep_fn = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

ChatMessage HttpBackend::complete(const ChatRequest& request) {
  const std::string body = request_body(request);
  httplib::Headers headers = {{"Accept", "application/json"}};
  if (const char* token = std::getenv(config_.auth_env_var.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error;
  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));

    auto result = client.Post(config_.completions_path, headers, body, "application/json");
    if (result) {
      const int status = result->status;
      if (status >= 200 && status < 300) {
        return ChatMessage{Role::assistant, first_choice_content(result->body)};
      }
      if (!transient_status(status)) {
        throw Error(Errc::permanent,
                    "HTTP " + std::to_string(status) + " from " + config_.completions_path);
      }
      last_error = "HTTP " + std::to_string(status);
    } else {
      last_error = httplib::to_string(result.error());
    }

    if (attempt >= config_.retry.max_attempts) {
      throw Error(Errc::transient,
                  last_error + " after " + std::to_string(attempt) + " attempts");
    }
    if (auto delay = retry_schedule(config_.retry, attempt)) {
      config_.sleep_fn(*delay);
    }
  }
}

}  // namespace therasim::llm
