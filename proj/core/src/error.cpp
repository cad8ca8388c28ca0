#include "therasim/error.hpp"

namespace therasim {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::empty_request: return "EMPTY_REQUEST";
    case Errc::transient: return "TRANSIENT";
    case Errc::permanent: return "PERMANENT";
    case Errc::script_exhausted: return "SCRIPT_EXHAUSTED";
    case Errc::empty_script: return "EMPTY_SCRIPT";
    case Errc::empty_completion: return "EMPTY_COMPLETION";
    case Errc::invalid_persona: return "INVALID_PERSONA";
    case Errc::invalid_profile: return "INVALID_PROFILE";
    case Errc::invalid_turns: return "INVALID_TURNS";
    case Errc::incomplete_transcript: return "INCOMPLETE_TRANSCRIPT";
    case Errc::unknown_approach: return "UNKNOWN_APPROACH";
    case Errc::unknown_technique: return "UNKNOWN_TECHNIQUE";
    case Errc::missing_field: return "MISSING_FIELD";
    case Errc::empty_response: return "EMPTY_RESPONSE";
    case Errc::dangling_session: return "DANGLING_SESSION";
    case Errc::empty_input: return "EMPTY_INPUT";
    case Errc::mode_mismatch: return "MODE_MISMATCH";
    case Errc::missing_groups: return "MISSING_GROUPS";
    case Errc::parse_error: return "PARSE_ERROR";
    case Errc::unknown_field: return "UNKNOWN_FIELD";
    case Errc::invalid_value: return "INVALID_VALUE";
    case Errc::malformed_record: return "MALFORMED_RECORD";
    case Errc::io_error: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace therasim
