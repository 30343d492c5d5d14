#include "witscript/error.hpp"

#include <array>
#include <utility>

namespace witscript {

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 6> kStageNames{{
    {Stage::HandleSelection, "HandleSelection"},
    {Stage::AssociationsA, "AssociationsA"},
    {Stage::AssociationsB, "AssociationsB"},
    {Stage::PunchlineCreation, "PunchlineCreation"},
    {Stage::AngleGeneration, "AngleGeneration"},
    {Stage::Filter, "Filter"},
}};

}  // namespace

std::string_view to_string(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "Unknown";
}

std::optional<Stage> stage_from_string(std::string_view name) {
  for (const auto& [s, n] : kStageNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyTopic: return "EmptyTopic";
    case ErrorCode::TopicTooLong: return "TopicTooLong";
    case ErrorCode::TooFewTokens: return "TooFewTokens";
    case ErrorCode::MultiLineTopic: return "MultiLineTopic";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::MissingStage: return "MissingStage";
    case ErrorCode::HygieneViolation: return "HygieneViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StageParseError: return "StageParseError";
    case ErrorCode::HandleNotInTopic: return "HandleNotInTopic";
    case ErrorCode::ChosenNotInList: return "ChosenNotInList";
    case ErrorCode::PunchlineDropped: return "PunchlineDropped";
    case ErrorCode::JokeRejected: return "JokeRejected";
    case ErrorCode::RatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::DuplicateRating: return "DuplicateRating";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::UnknownPair: return "UnknownPair";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool Error::is_validation_error() const noexcept {
  switch (code_) {
    case ErrorCode::EmptyTopic:
    case ErrorCode::TopicTooLong:
    case ErrorCode::TooFewTokens:
    case ErrorCode::MultiLineTopic:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace witscript
