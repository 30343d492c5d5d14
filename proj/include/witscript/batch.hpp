#pragma once

#include <string>
#include <variant>
#include <vector>

#include "witscript/pipeline.hpp"

namespace witscript {

using BatchResult = std::variant<JokeResponse, Error>;

/// Generates one joke per topic on at most `parallelism` worker threads.
/// results[i] always corresponds to topics[i].
std::vector<BatchResult> run_batch(const std::vector<std::string>& topics,
                                   CompletionBackend& backend, const PromptSet& prompts,
                                   const PipelineConfig& config, std::size_t parallelism);

}  // namespace witscript
