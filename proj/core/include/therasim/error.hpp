#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace therasim {

// Machine-readable error codes shared across the library. The names returned
// by errc_name() are stable and safe to match on in callers and reports.
enum class Errc {
  // gateway
  empty_request,
  transient,
  permanent,
  script_exhausted,
  empty_script,
  empty_completion,
  // persona / prompts
  invalid_persona,
  invalid_profile,
  // selfplay
  invalid_turns,
  // analyst
  incomplete_transcript,
  unknown_approach,
  unknown_technique,
  missing_field,
  empty_response,
  // analytics
  dangling_session,
  empty_input,
  mode_mismatch,
  missing_groups,
  // workbench / config
  parse_error,
  unknown_field,
  invalid_value,
  malformed_record,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace therasim
