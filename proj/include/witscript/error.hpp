#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace witscript {

/// Pipeline stages, in execution order. Step 1 (topic selection) is local and
/// has no stage record.
enum class Stage {
  HandleSelection,
  AssociationsA,
  AssociationsB,
  PunchlineCreation,
  AngleGeneration,
  Filter,
};

std::string_view to_string(Stage stage);
std::optional<Stage> stage_from_string(std::string_view name);

enum class ErrorCode {
  // topic validation
  EmptyTopic,
  TopicTooLong,
  TooFewTokens,
  MultiLineTopic,
  // backend
  AuthError,
  TransportError,
  ProtocolError,
  EmptyCompletion,
  ScriptExhausted,
  // prompts
  MissingBinding,
  UnknownPlaceholder,
  MissingStage,
  HygieneViolation,
  ParseError,
  // pipeline
  StageParseError,
  HandleNotInTopic,
  ChosenNotInList,
  PunchlineDropped,
  JokeRejected,
  // evaluation
  RatingOutOfRange,
  DuplicateRating,
  EmptyInput,
  ShapeError,
  UnknownPair,
  // general
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. `stage()` is set once the
/// error has crossed a pipeline stage boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<Stage> stage = std::nullopt)
      : std::runtime_error(message), code_(code), stage_(stage) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<Stage>& stage() const noexcept { return stage_; }
  void set_stage(Stage stage) noexcept { stage_ = stage; }

  /// True for failures caused by the user's input rather than a backend or
  /// stage (maps to exit code 1 / HTTP 400).
  bool is_validation_error() const noexcept;

 private:
  ErrorCode code_;
  std::optional<Stage> stage_;
};

}  // namespace witscript
