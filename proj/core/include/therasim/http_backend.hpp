#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "therasim/backend.hpp"

namespace therasim::llm {

// Configuration for the live chat-completion client. The wire format is the
// de-facto standard: POST {model, messages, temperature, max_tokens, top_p}
// to base_url + completions_path with bearer-token auth read from the named
// environment variable.
struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string completions_path = "/v1/chat/completions";
  std::string auth_env_var = "OPENAI_API_KEY";
  RetryPolicy retry{};
  std::chrono::milliseconds timeout{60'000};
  // Test hook; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep_fn;
};

// Live backend over HTTP. TRANSIENT failures (connect errors, timeouts,
// 408/429/5xx) are retried per the policy; PERMANENT failures (other 4xx,
// malformed responses) are never retried. Concurrent in-flight requests are
// bounded by the token-bucket rate limiter.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  ChatMessage complete(const ChatRequest& request) override;

 private:
  HttpBackendConfig config_;
  RateLimiter limiter_;
};

}  // namespace therasim::llm
