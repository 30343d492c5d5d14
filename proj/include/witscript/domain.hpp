#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "witscript/error.hpp"

namespace witscript {

/// Limits a topic sentence must satisfy.
inline constexpr std::size_t kTopicMaxChars = 500;
inline constexpr std::size_t kTopicMinTokens = 3;

/// The statement the joke is based on. Construct through make_topic (or the
/// pipeline's validate_topic), which enforces the invariants.
struct Topic {
  std::string text;
  std::optional<std::string> id;
};

/// Validates and trims `text`; throws Error(EmptyTopic | MultiLineTopic |
/// TopicTooLong | TooFewTokens).
Topic make_topic(std::string_view text, std::optional<std::string> id = std::nullopt);

/// The two most attention-getting words or phrases of the topic.
struct TopicHandles {
  std::string first;
  std::string second;
};

/// Things an audience readily thinks of for one handle.
struct AssociationList {
  std::string handle;
  std::vector<std::string> items;

  /// Item equal to `candidate` under normalization, if any.
  std::optional<std::string> find(std::string_view candidate) const;
};

/// Builds a list from raw candidates: trims, drops empties, drops the handle
/// itself, dedupes (first spelling wins) and keeps at most `limit` items.
AssociationList make_association_list(std::string handle,
                                      const std::vector<std::string>& candidates,
                                      std::size_t limit);

struct PunchLine {
  std::string text;
  std::string chosen_a;
  std::string chosen_b;
};

/// Audit record for one backend-backed stage. prompt_text and raw_completion
/// belong to the last attempt.
struct StageRecord {
  Stage stage = Stage::HandleSelection;
  std::string prompt_text;
  std::string raw_completion;
  std::string parsed_summary;
  int attempts = 1;
  std::chrono::duration<double, std::milli> elapsed{0};
};

struct JokeResponse {
  Topic topic;
  TopicHandles handles;
  std::pair<AssociationList, AssociationList> associations;
  PunchLine punchline;
  std::string joke_text;
  bool punchline_intact = false;
  std::vector<StageRecord> trace;
};

/// Checks every JokeResponse invariant; returns a description of the first
/// violation, or nullopt when the response is consistent.
std::optional<std::string> check_invariants(const JokeResponse& response);

}  // namespace witscript
