#include "therasim/backend.hpp"

#include "therasim/error.hpp"

namespace therasim::llm {

ChatMessage complete(Backend& backend, const ChatRequest& request) {
  validate_request(request);
  ChatMessage reply = backend.complete(request);
  reply.role = Role::assistant;
  return reply;
}

ScriptedBackend::ScriptedBackend(Script script) : script_(std::move(script)) {
  if (script_.empty()) {
    throw Error(Errc::empty_script, "script has no reply streams");
  }
  for (const auto& [tag, replies] : script_) {
    if (replies.empty()) {
      throw Error(Errc::empty_script, "stream '" + tag + "' has no replies");
    }
    for (const auto& reply : replies) {
      if (reply.empty()) {
        throw Error(Errc::empty_script, "stream '" + tag + "' contains an empty reply");
      }
    }
  }
}

ChatMessage ScriptedBackend::complete(const ChatRequest& request) {
  std::string stream_key = request.agent_tag;
  if (!request.session_id.empty()) {
    const std::string scoped = request.agent_tag + ":" + request.session_id;
    if (script_.contains(scoped)) stream_key = scoped;
  }
  auto stream = script_.find(stream_key);
  if (stream == script_.end()) {
    throw Error(Errc::script_exhausted, "no scripted replies for tag '" + request.agent_tag + "'");
  }

  const std::string cursor_key = stream_key + "\x1f" + request.session_id;
  std::size_t index = 0;
  {
    std::scoped_lock lock(mu_);
    index = cursors_[cursor_key]++;
  }
  if (index >= stream->second.size()) {
    throw Error(Errc::script_exhausted,
                "stream '" + stream_key + "' exhausted after " +
                    std::to_string(stream->second.size()) + " replies");
  }
  return ChatMessage{Role::assistant, stream->second[index]};
}

}  // namespace therasim::llm
