#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "therasim/chat.hpp"

namespace therasim::llm {

// Uniform chat-completion interface. Implementations must be safe to share
// across concurrent callers.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatMessage complete(const ChatRequest& request) = 0;
};

// Validates the request, then dispatches to the backend. Always returns an
// assistant message.
ChatMessage complete(Backend& backend, const ChatRequest& request);

// Deterministic offline backend: replays scripted replies in order.
//
// Stream selection: the reply list under "<agent_tag>:<session_id>" if the
// script has one, otherwise the list under "<agent_tag>". Replay position
// is tracked per (stream, session), so every session replays a shared
// stream from its start and concurrent sessions cannot observe each
// other's consumption. Requests without a session share one cursor per
// stream.
class ScriptedBackend : public Backend {
 public:
  using Script = std::map<std::string, std::vector<std::string>>;

  // Throws EMPTY_SCRIPT when the script has no streams or any reply is
  // empty.
  explicit ScriptedBackend(Script script);

  ChatMessage complete(const ChatRequest& request) override;

 private:
  Script script_;
  std::mutex mu_;
  std::map<std::string, std::size_t> cursors_;
};

}  // namespace therasim::llm
