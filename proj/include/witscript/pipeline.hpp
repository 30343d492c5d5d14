#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "witscript/backend.hpp"
#include "witscript/domain.hpp"
#include "witscript/prompts.hpp"

namespace witscript {

enum class FilterPolicy { Off, Heuristic, ModelJudged };

std::string_view to_string(FilterPolicy policy);
std::optional<FilterPolicy> filter_policy_from_string(std::string_view name);

struct DecodingParams {
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
  std::vector<std::string> stop_sequences;
};

struct PipelineConfig {
  /// K: associations kept per handle, in [1, 10].
  int associations_per_handle = 5;
  /// R: re-prompts allowed per stage after the first attempt.
  int retries_per_stage = 2;
  /// When set, a joke that drops its punch line is retried and then fails.
  bool strict_punchline = false;
  FilterPolicy filter_policy = FilterPolicy::Off;
  DecodingParams default_decoding;
  std::map<PromptStage, DecodingParams> stage_decoding;

  const DecodingParams& decoding_for(PromptStage stage) const;
  /// Throws Error(InvalidArgument).
  void validate() const;
};

/// Everything a stage needs besides its own inputs.
struct PipelineContext {
  CompletionBackend& backend;
  const PromptSet& prompts;
  const PipelineConfig& config;
};

template <typename T>
struct StageOutput {
  T value;
  StageRecord record;
};

/// Same contract as make_topic.
Topic validate_topic(std::string_view text);

/// Items from lines shaped "N. item", "N) item", "- item" / "* item", or bare
/// lines; trimmed, empties dropped, duplicates kept.
std::vector<std::string> parse_numbered_list(std::string_view raw);

struct PunchlineChoice {
  std::string chosen_a;
  std::string chosen_b;
  std::string text;
};

/// Finds "A: <item> | B: <item> | PUNCHLINE: <text>" (labels case-insensitive)
/// on any line of the completion.
std::optional<PunchlineChoice> parse_punchline_completion(std::string_view raw);

/// First standalone digit 1-4 in the completion.
std::optional<int> parse_rating_completion(std::string_view raw);

/// Numbered list rendering used for {assoc_list_a}/{assoc_list_b}.
std::string format_association_list(const AssociationList& list);

StageOutput<TopicHandles> select_handles(const Topic& topic, const PipelineContext& ctx);

StageOutput<AssociationList> generate_associations(const std::string& handle, const Topic& topic,
                                                   Stage stage, const PipelineContext& ctx);

StageOutput<PunchLine> create_punchline(const AssociationList& list_a, const AssociationList& list_b,
                                        const PipelineContext& ctx);

struct AngleResult {
  std::string joke_text;
  bool punchline_intact = false;
};

StageOutput<AngleResult> generate_angle(const Topic& topic, const PunchLine& punchline,
                                        const PipelineContext& ctx);

struct FilterVerdict {
  bool accept = true;
  double score = 1.0;
  /// Present only for ModelJudged.
  std::optional<StageRecord> record;
};

/// Heuristic score: 0.4 * intact + 0.3 * (4..60 tokens) + 0.3 * novelty.
double heuristic_filter_score(const JokeResponse& candidate);

/// Off: accept with score 1. Heuristic: accept iff score >= 0.5. ModelJudged:
/// one backend call for a 1-4 rating, accept iff >= 3, score (rating-1)/3.
FilterVerdict filter_joke(const JokeResponse& candidate, const PipelineContext& ctx);

/// Thrown by generate_joke when the filter rejects a finished candidate.
class JokeRejectedError : public Error {
 public:
  JokeRejectedError(JokeResponse candidate, double score);
  const JokeResponse& candidate() const noexcept { return candidate_; }
  double score() const noexcept { return score_; }

 private:
  JokeResponse candidate_;
  double score_;
};

/// Runs the five steps plus the optional filter. Every error carries the stage
/// it came from (topic validation errors carry none).
JokeResponse generate_joke(std::string_view text, CompletionBackend& backend,
                           const PromptSet& prompts, const PipelineConfig& config);

}  // namespace witscript
