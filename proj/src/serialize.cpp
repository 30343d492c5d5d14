#include "witscript/serialize.hpp"

namespace witscript {

using nlohmann::json;

json to_json(const StageRecord& record, bool include_timing) {
  json j = {
      {"stage", to_string(record.stage)},
      {"prompt_text", record.prompt_text},
      {"raw_completion", record.raw_completion},
      {"parsed_summary", record.parsed_summary},
      {"attempts", record.attempts},
  };
  if (include_timing) j["elapsed_ms"] = record.elapsed.count();
  return j;
}

json to_json(const JokeResponse& r, bool include_trace) {
  auto list = [](const AssociationList& l) { return json{{"handle", l.handle}, {"items", l.items}}; };
  json j = {
      {"topic", r.topic.text},
      {"handles", {{"first", r.handles.first}, {"second", r.handles.second}}},
      {"associations", json::array({list(r.associations.first), list(r.associations.second)})},
      {"punchline",
       {{"text", r.punchline.text}, {"chosen_a", r.punchline.chosen_a}, {"chosen_b", r.punchline.chosen_b}}},
      {"joke_text", r.joke_text},
      {"punchline_intact", r.punchline_intact},
  };
  if (include_trace) {
    json trace = json::array();
    for (const auto& rec : r.trace) trace.push_back(to_json(rec));
    j["trace"] = std::move(trace);
  }
  return j;
}

JokeResponse joke_response_from_json(const json& doc) {
  try {
    JokeResponse r;
    r.topic.text = doc.at("topic").get<std::string>();
    r.handles = {doc.at("handles").at("first").get<std::string>(),
                 doc.at("handles").at("second").get<std::string>()};
    const auto& assoc = doc.at("associations");
    if (!assoc.is_array() || assoc.size() != 2) throw Error(ErrorCode::ParseError, "associations must have 2 entries");
    auto list = [](const json& j) {
      return AssociationList{j.at("handle").get<std::string>(), j.at("items").get<std::vector<std::string>>()};
    };
    r.associations = {list(assoc[0]), list(assoc[1])};
    const auto& p = doc.at("punchline");
    r.punchline = {p.at("text").get<std::string>(), p.at("chosen_a").get<std::string>(),
                   p.at("chosen_b").get<std::string>()};
    r.joke_text = doc.at("joke_text").get<std::string>();
    r.punchline_intact = doc.at("punchline_intact").get<bool>();
    if (doc.contains("trace")) {
      for (const auto& t : doc.at("trace")) {
        StageRecord rec;
        const auto stage = stage_from_string(t.at("stage").get<std::string>());
        if (!stage) throw Error(ErrorCode::ParseError, "unknown stage in trace");
        rec.stage = *stage;
        rec.prompt_text = t.at("prompt_text").get<std::string>();
        rec.raw_completion = t.at("raw_completion").get<std::string>();
        rec.parsed_summary = t.at("parsed_summary").get<std::string>();
        rec.attempts = t.at("attempts").get<int>();
        rec.elapsed = std::chrono::duration<double, std::milli>(t.value("elapsed_ms", 0.0));
        r.trace.push_back(std::move(rec));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed joke response: ") + e.what());
  }
}

json error_to_json(const Error& error) {
  return {
      {"error", to_string(error.code())},
      {"stage", error.stage() ? json(to_string(*error.stage())) : json(nullptr)},
      {"message", error.what()},
  };
}

json to_json(const ResponsePair& pair) {
  return {
      {"input_id", pair.input_id},
      {"source", to_string(pair.source)},
      {"input_text", pair.input_text},
      {"response_text", pair.response_text},
      {"mean_rating", pair.mean_rating},
  };
}

json to_json(const std::vector<SystemStats>& stats) {
  json out = json::array();
  for (const auto& s : stats) {
    out.push_back({{"source", to_string(s.source)},
                   {"system", display_name(s.source)},
                   {"mean_rating", s.mean_rating},
                   {"pct_jokes", s.pct_jokes}});
  }
  return out;
}

}  // namespace witscript
