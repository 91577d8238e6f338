#include "chordiag/error.hpp"

namespace chordiag {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRoot: return "MalformedRoot";
    case ErrorCode::UnknownNature: return "UnknownNature";
    case ErrorCode::MalformedBass: return "MalformedBass";
    case ErrorCode::MalformedFingering: return "MalformedFingering";
    case ErrorCode::WrongStringCount: return "WrongStringCount";
    case ErrorCode::FretOutOfRange: return "FretOutOfRange";
    case ErrorCode::AllMuted: return "AllMuted";
    case ErrorCode::OpenStringUnshiftable: return "OpenStringUnshiftable";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MissingContext: return "MissingContext";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewTransitions: return "TooFewTransitions";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_label_error(ErrorCode code) noexcept {
  return code == ErrorCode::MalformedRoot || code == ErrorCode::UnknownNature ||
         code == ErrorCode::MalformedBass;
}

bool is_fingering_error(ErrorCode code) noexcept {
  return code == ErrorCode::MalformedFingering || code == ErrorCode::WrongStringCount ||
         code == ErrorCode::FretOutOfRange || code == ErrorCode::AllMuted;
}

}  // namespace chordiag
