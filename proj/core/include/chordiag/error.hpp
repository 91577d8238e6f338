#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chordiag {

/// Machine-readable failure categories shared by every module.
enum class ErrorCode {
  // chord labels
  MalformedRoot,
  UnknownNature,
  MalformedBass,
  // fingerings / diagrams
  MalformedFingering,
  WrongStringCount,
  FretOutOfRange,
  AllMuted,
  OpenStringUnshiftable,
  // model
  WidthMismatch,
  EmptySplit,
  CorruptFile,
  VersionMismatch,
  // suggestion / evaluation
  MissingContext,
  EmptyTestSet,
  // data pipeline
  ParseError,
  TooFewTransitions,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for the codes produced while parsing a chord label.
bool is_label_error(ErrorCode code) noexcept;

/// True for the codes produced while parsing or validating a fingering.
bool is_fingering_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chordiag
