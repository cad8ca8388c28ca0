#include "therasim/chat.hpp"

#include <cmath>

#include "therasim/error.hpp"

namespace therasim::llm {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "";
}

GenerationParams analyst_params() {
  GenerationParams params;
  params.temperature = 0.0;
  params.max_tokens = 300;
  return params;
}

void validate_request(const ChatRequest& request) {
  if (request.messages.empty()) {
    throw Error(Errc::empty_request, "request has no messages");
  }
  for (std::size_t i = 0; i < request.messages.size(); ++i) {
    const ChatMessage& m = request.messages[i];
    if (m.role == Role::system && i != 0) {
      throw Error(Errc::permanent, "system message must be first and unique");
    }
    if (m.role != Role::system && m.content.empty()) {
      throw Error(Errc::permanent, "non-system message content must not be empty");
    }
  }
  const GenerationParams& p = request.params;
  if (p.model_name.empty()) throw Error(Errc::permanent, "model_name must not be empty");
  if (p.temperature < 0.0) throw Error(Errc::permanent, "temperature must be >= 0");
  if (p.max_tokens <= 0) throw Error(Errc::permanent, "max_tokens must be positive");
  if (!(p.top_p > 0.0 && p.top_p <= 1.0)) throw Error(Errc::permanent, "top_p must be in (0,1]");
}

std::optional<std::chrono::milliseconds> retry_schedule(const RetryPolicy& policy, int attempt) {
  if (attempt < 1) {
    throw Error(Errc::invalid_value, "attempt must be >= 1, got " + std::to_string(attempt));
  }
  if (attempt > policy.max_attempts) return std::nullopt;
  const double delay_ms = static_cast<double>(policy.base_delay.count()) *
                          std::pow(policy.backoff_factor, attempt - 1);
  return std::chrono::milliseconds(static_cast<long long>(std::llround(delay_ms)));
}

RateLimiter::RateLimiter(int max_requests, std::chrono::milliseconds window)
    : max_requests_(max_requests), window_(window) {}

void RateLimiter::acquire() {
  if (max_requests_ <= 0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    while (!issued_.empty() && now - issued_.front() >= window_) {
      issued_.pop_front();
    }
    if (static_cast<int>(issued_.size()) < max_requests_) {
      issued_.push_back(now);
      return;
    }
    cv_.wait_until(lock, issued_.front() + window_);
  }
}

}  // namespace therasim::llm
