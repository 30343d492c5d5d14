#include "witscript/domain.hpp"

#include <algorithm>
#include <array>

#include "witscript/normalize.hpp"

namespace witscript {

Topic make_topic(std::string_view text, std::optional<std::string> id) {
  std::string trimmed = trim(text);
  if (trimmed.empty()) {
    throw Error(ErrorCode::EmptyTopic, "topic is empty");
  }
  if (trimmed.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorCode::MultiLineTopic, "topic must be a single line");
  }
  if (utf8_length(trimmed) > kTopicMaxChars) {
    throw Error(ErrorCode::TopicTooLong,
                "topic exceeds " + std::to_string(kTopicMaxChars) + " characters");
  }
  if (split_whitespace(trimmed).size() < kTopicMinTokens) {
    throw Error(ErrorCode::TooFewTokens,
                "topic needs at least " + std::to_string(kTopicMinTokens) + " words");
  }
  return Topic{std::move(trimmed), std::move(id)};
}

std::optional<std::string> AssociationList::find(std::string_view candidate) const {
  const std::string key = normalize_for_match(candidate);
  if (key.empty()) return std::nullopt;
  for (const auto& item : items) {
    if (normalize_for_match(item) == key) return item;
  }
  return std::nullopt;
}

AssociationList make_association_list(std::string handle,
                                      const std::vector<std::string>& candidates,
                                      std::size_t limit) {
  AssociationList list{std::move(handle), {}};
  const std::string handle_key = normalize_for_match(list.handle);
  std::vector<std::string> seen;
  for (const auto& raw : candidates) {
    if (list.items.size() >= limit) break;
    std::string item = trim(raw);
    const std::string key = normalize_for_match(item);
    if (key.empty() || key == handle_key) continue;
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    list.items.push_back(std::move(item));
  }
  return list;
}

std::optional<std::string> check_invariants(const JokeResponse& r) {
  const std::string first = normalize_for_match(r.handles.first);
  if (first.empty() || first == normalize_for_match(r.handles.second)) {
    return "handles are empty or identical";
  }
  if (!handle_occurs_in_topic(r.handles.first, r.topic.text) ||
      !handle_occurs_in_topic(r.handles.second, r.topic.text)) {
    return "handle does not occur in topic";
  }
  for (const auto* list : {&r.associations.first, &r.associations.second}) {
    if (list->items.empty()) return "empty association list";
    const std::string handle_key = normalize_for_match(list->handle);
    std::vector<std::string> seen;
    for (const auto& item : list->items) {
      const std::string key = normalize_for_match(item);
      if (trim(item).empty() || key == handle_key) return "invalid association item";
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) return "duplicate association";
      seen.push_back(key);
    }
  }
  if (r.punchline.text.empty()) return "empty punch line";
  if (!r.associations.first.find(r.punchline.chosen_a) ||
      !r.associations.second.find(r.punchline.chosen_b)) {
    return "chosen association is not a list member";
  }
  if (r.punchline_intact != ends_with_punchline(r.joke_text, r.punchline.text)) {
    return "punchline_intact flag inconsistent with joke text";
  }

  constexpr std::array kRequired{Stage::HandleSelection, Stage::AssociationsA,
                                 Stage::AssociationsB, Stage::PunchlineCreation,
                                 Stage::AngleGeneration};
  const std::size_t n = r.trace.size();
  if (n != 0) {  // trace may be stripped for transport
    if (n != kRequired.size() && !(n == kRequired.size() + 1 && r.trace.back().stage == Stage::Filter)) {
      return "trace has wrong number of records";
    }
    for (std::size_t i = 0; i < kRequired.size(); ++i) {
      if (r.trace[i].stage != kRequired[i]) return "trace out of order";
    }
  }
  return std::nullopt;
}

}  // namespace witscript
