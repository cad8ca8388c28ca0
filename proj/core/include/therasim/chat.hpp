#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace therasim::llm {

enum class Role { system, user, assistant };

std::string_view role_name(Role role);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct GenerationParams {
  std::string model_name = "gpt-4o";
  double temperature = 0.7;
  int max_tokens = 400;
  double top_p = 1.0;

  bool operator==(const GenerationParams&) const = default;
};

// Sampling defaults for the transcript classifier: it needs stable output,
// not variation.
GenerationParams analyst_params();

struct ChatRequest {
  std::vector<ChatMessage> messages;
  GenerationParams params;
  // Request metadata. agent_tag selects the reply stream of a scripted
  // backend; session_id scopes that stream so concurrent sessions replay
  // independently.
  std::string agent_tag;
  std::string session_id;
};

// Throws EMPTY_REQUEST / PERMANENT when the request violates its contract
// (no messages, misplaced or duplicated system message, bad params).
void validate_request(const ChatRequest& request);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};
  double backoff_factor = 2.0;
  // Token-bucket rate limit per backend instance; max_requests <= 0 means
  // unlimited.
  int rate_limit_max_requests = 0;
  std::chrono::milliseconds rate_limit_window{60'000};
};

// Backoff delay before the attempt following `attempt` failures:
// base_delay * backoff_factor^(attempt-1) while attempt <= max_attempts,
// std::nullopt once attempts are used up.
std::optional<std::chrono::milliseconds> retry_schedule(const RetryPolicy& policy, int attempt);

class RateLimiter {
 public:
  RateLimiter(int max_requests, std::chrono::milliseconds window);

  // Blocks until a request slot is available.
  void acquire();

 private:
  int max_requests_;
  std::chrono::milliseconds window_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::chrono::steady_clock::time_point> issued_;
};

}  // namespace therasim::llm
