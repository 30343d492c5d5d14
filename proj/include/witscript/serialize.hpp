#pragma once

#include <json.hpp>

#include "witscript/corpus.hpp"
#include "witscript/domain.hpp"
#include "witscript/evaluation.hpp"

namespace witscript {

/// Wire form: topic, handles{first,second}, associations[2]{handle,items[]},
/// punchline{text,chosen_a,chosen_b}, joke_text, punchline_intact and, when
/// requested, trace[].
nlohmann::json to_json(const JokeResponse& response, bool include_trace = false);
nlohmann::json to_json(const StageRecord& record, bool include_timing = true);

/// Inverse of to_json; throws Error(ParseError) on a malformed document.
JokeResponse joke_response_from_json(const nlohmann::json& doc);

/// {"error": <code>, "stage": <stage|null>, "message": <text>}
nlohmann::json error_to_json(const Error& error);

nlohmann::json to_json(const ResponsePair& pair);
nlohmann::json to_json(const std::vector<SystemStats>& stats);

}  // namespace witscript
