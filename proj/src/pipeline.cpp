#include "witscript/pipeline.hpp"

#include <chrono>
#include <regex>

#include "witscript/normalize.hpp"

namespace witscript {

std::string_view to_string(FilterPolicy policy) {
  switch (policy) {
    case FilterPolicy::Off: return "off";
    case FilterPolicy::Heuristic: return "heuristic";
    case FilterPolicy::ModelJudged: return "model";
  }
  return "off";
}

std::optional<FilterPolicy> filter_policy_from_string(std::string_view name) {
  if (name == "off") return FilterPolicy::Off;
  if (name == "heuristic") return FilterPolicy::Heuristic;
  if (name == "model" || name == "model-judged") return FilterPolicy::ModelJudged;
  return std::nullopt;
}

const DecodingParams& PipelineConfig::decoding_for(PromptStage stage) const {
  const auto it = stage_decoding.find(stage);
  return it == stage_decoding.end() ? default_decoding : it->second;
}

void PipelineConfig::validate() const {
  if (associations_per_handle < 1 || associations_per_handle > 10) {
    throw Error(ErrorCode::InvalidArgument, "associations per handle must be in [1, 10]");
  }
  if (retries_per_stage < 0) throw Error(ErrorCode::InvalidArgument, "retries per stage must be >= 0");
  auto check = [](const DecodingParams& d) {
    CompletionRequest{"x", d.max_tokens, d.temperature, d.stop_sequences}.validate();
  };
  check(default_decoding);
  for (const auto& [stage, d] : stage_decoding) check(d);
}

Topic validate_topic(std::string_view text) { return make_topic(text); }

namespace {

using Clock = std::chrono::steady_clock;

bool is_retryable(ErrorCode code) {
  switch (code) {
    case ErrorCode::StageParseError:
    case ErrorCode::HandleNotInTopic:
    case ErrorCode::ChosenNotInList:
    case ErrorCode::PunchlineDropped:
    case ErrorCode::EmptyCompletion:
      return true;
    default:
      return false;
  }
}

std::string strip_quotes(std::string text) {
  static const std::vector<std::pair<std::string, std::string>> kQuotes{
      {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
  for (const auto& [open, close] : kQuotes) {
    if (text.size() >= open.size() + close.size() && text.rfind(open, 0) == 0 &&
        text.compare(text.size() - close.size(), close.size(), close) == 0) {
      return trim(text.substr(open.size(), text.size() - open.size() - close.size()));
    }
  }
  return text;
}

/// One backend-backed stage: render once, then call/parse up to 1 + R times.
/// `parse` throws a retryable Error to ask for another attempt.
template <typename T, typename Parse, typename Summarize>
StageOutput<T> run_stage(Stage stage, PromptStage prompt_stage, const Bindings& bindings,
                         const PipelineContext& ctx, Parse parse, Summarize summarize) {
  const auto started = Clock::now();
  StageRecord record;
  record.stage = stage;
  try {
    record.prompt_text = render(ctx.prompts.at(prompt_stage), bindings);
  } catch (Error& e) {
    e.set_stage(stage);
    throw;
  }

  const auto& decoding = ctx.config.decoding_for(prompt_stage);
  const CompletionRequest request{record.prompt_text, decoding.max_tokens, decoding.temperature,
                                  decoding.stop_sequences};
  const int max_attempts = 1 + ctx.config.retries_per_stage;
  std::optional<Error> last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    record.attempts = attempt;
    try {
      const CompletionResult result = ctx.backend.complete(request);
      record.raw_completion = result.text;
      T value = parse(result.text);
      record.parsed_summary = summarize(value);
      record.elapsed = Clock::now() - started;
      return {std::move(value), std::move(record)};
    } catch (Error& e) {
      e.set_stage(stage);
      if (!is_retryable(e.code())) throw;
      last_error = e;
    }
  }
  throw *last_error;
}

}  // namespace

std::vector<std::string> parse_numbered_list(std::string_view raw) {
  static const std::regex kNumbered(R"(^\(?\d+\s*[.):]\s*(.*)$)");
  static const std::regex kBullet(R"(^(?:[-*+]|\xE2\x80\xA2)\s+(.*)$)");
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    const std::string line = trim(raw.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    std::smatch m;
    std::string item;
    if (std::regex_match(line, m, kNumbered) || std::regex_match(line, m, kBullet)) {
      item = trim(m[1].str());
    } else {
      item = line;
    }
    if (!item.empty()) items.push_back(std::move(item));
  }
  return items;
}

std::optional<PunchlineChoice> parse_punchline_completion(std::string_view raw) {
  static const std::regex kLine(
      R"(^\s*A\s*:\s*(.*?)\s*\|\s*B\s*:\s*(.*?)\s*\|\s*PUNCH\s*LINE\s*:\s*(.*?)\s*$)",
      std::regex::icase);
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    const std::string line(raw.substr(pos, eol - pos));
    pos = eol + 1;
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    PunchlineChoice choice{strip_quotes(trim(m[1].str())), strip_quotes(trim(m[2].str())),
                           strip_quotes(trim(m[3].str()))};
    if (choice.chosen_a.empty() || choice.chosen_b.empty() || choice.text.empty()) continue;
    return choice;
  }
  return std::nullopt;
}

std::optional<int> parse_rating_completion(std::string_view raw) {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!is_digit(raw[i])) continue;
    std::size_t j = i;
    while (j < raw.size() && is_digit(raw[j])) ++j;
    if (j - i == 1 && raw[i] >= '1' && raw[i] <= '4') return raw[i] - '0';
    i = j;
  }
  return std::nullopt;
}

std::string format_association_list(const AssociationList& list) {
  std::string out = "Associations of \"" + list.handle + "\":";
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    out += "\n" + std::to_string(i + 1) + ". " + list.items[i];
  }
  return out;
}

StageOutput<TopicHandles> select_handles(const Topic& topic, const PipelineContext& ctx) {
  return run_stage<TopicHandles>(
      Stage::HandleSelection, PromptStage::HandleSelection, {{"topic", topic.text}}, ctx,
      [&](const std::string& completion) {
        auto items = parse_numbered_list(completion);
        for (auto& item : items) item = strip_quotes(std::move(item));
        if (items.size() != 2) {
          throw Error(ErrorCode::StageParseError,
                      "expected exactly two topic handles, got " + std::to_string(items.size()));
        }
        if (normalize_for_match(items[0]).empty() ||
            normalize_for_match(items[0]) == normalize_for_match(items[1])) {
          throw Error(ErrorCode::StageParseError, "topic handles are empty or identical");
        }
        for (const auto& handle : items) {
          if (!handle_occurs_in_topic(handle, topic.text)) {
            throw Error(ErrorCode::HandleNotInTopic, "handle \"" + handle + "\" does not occur in the topic");
          }
        }
        return TopicHandles{items[0], items[1]};
      },
      [](const TopicHandles& h) { return h.first + " | " + h.second; });
}

StageOutput<AssociationList> generate_associations(const std::string& handle, const Topic& topic,
                                                   Stage stage, const PipelineContext& ctx) {
  const auto limit = static_cast<std::size_t>(ctx.config.associations_per_handle);
  return run_stage<AssociationList>(
      stage, PromptStage::Associations, {{"handle", handle}, {"topic", topic.text}}, ctx,
      [&](const std::string& completion) {
        auto candidates = parse_numbered_list(completion);
        for (auto& c : candidates) c = strip_quotes(std::move(c));
        auto list = make_association_list(handle, candidates, limit);
        if (list.items.empty()) {
          throw Error(ErrorCode::StageParseError, "no usable associations for \"" + handle + "\"");
        }
        return list;
      },
      [](const AssociationList& list) {
        std::string s;
        for (const auto& item : list.items) s += (s.empty() ? "" : "; ") + item;
        return s;
      });
}

StageOutput<PunchLine> create_punchline(const AssociationList& list_a, const AssociationList& list_b,
                                        const PipelineContext& ctx) {
  return run_stage<PunchLine>(
      Stage::PunchlineCreation, PromptStage::PunchlineCreation,
      {{"assoc_list_a", format_association_list(list_a)},
       {"assoc_list_b", format_association_list(list_b)}},
      ctx,
      [&](const std::string& completion) {
        const auto choice = parse_punchline_completion(completion);
        if (!choice) {
          throw Error(ErrorCode::StageParseError,
                      "completion lacks an \"A: ... | B: ... | PUNCHLINE: ...\" line");
        }
        const auto a = list_a.find(choice->chosen_a);
        const auto b = list_b.find(choice->chosen_b);
        if (!a || !b) {
          throw Error(ErrorCode::ChosenNotInList,
                      "chosen association \"" + (a ? choice->chosen_b : choice->chosen_a) +
                          "\" is not in its list");
        }
        return PunchLine{choice->text, *a, *b};
      },
      [](const PunchLine& p) { return p.text + " (" + p.chosen_a + " + " + p.chosen_b + ")"; });
}

StageOutput<AngleResult> generate_angle(const Topic& topic, const PunchLine& punchline,
                                        const PipelineContext& ctx) {
  return run_stage<AngleResult>(
      Stage::AngleGeneration, PromptStage::AngleGeneration,
      {{"topic", topic.text}, {"punchline", punchline.text}}, ctx,
      [&](const std::string& completion) {
        if (completion.empty()) throw Error(ErrorCode::EmptyCompletion, "empty joke text");
        AngleResult result{completion, ends_with_punchline(completion, punchline.text)};
        if (ctx.config.strict_punchline && !result.punchline_intact) {
          throw Error(ErrorCode::PunchlineDropped, "joke does not end with the punch line");
        }
        return result;
      },
      [](const AngleResult& r) { return r.punchline_intact ? "intact" : "punch line replaced"; });
}

double heuristic_filter_score(const JokeResponse& candidate) {
  const std::size_t tokens = split_whitespace(candidate.joke_text).size();
  const bool in_bounds = tokens >= 4 && tokens <= 60;
  const std::string joke = normalize_for_match(candidate.joke_text);
  const bool novel = joke != normalize_for_match(candidate.topic.text) &&
                     joke != normalize_for_match(candidate.punchline.text);
  return (candidate.punchline_intact ? 0.4 : 0.0) + (in_bounds ? 0.3 : 0.0) + (novel ? 0.3 : 0.0);
}

FilterVerdict filter_joke(const JokeResponse& candidate, const PipelineContext& ctx) {
  switch (ctx.config.filter_policy) {
    case FilterPolicy::Off:
      return {true, 1.0, std::nullopt};
    case FilterPolicy::Heuristic: {
      const double score = heuristic_filter_score(candidate);
      return {score >= 0.5 - 1e-9, score, std::nullopt};
    }
    case FilterPolicy::ModelJudged: {
      auto out = run_stage<int>(
          Stage::Filter, PromptStage::Filter,
          {{"topic", candidate.topic.text}, {"joke", candidate.joke_text}}, ctx,
          [](const std::string& completion) {
            const auto rating = parse_rating_completion(completion);
            if (!rating) throw Error(ErrorCode::StageParseError, "no 1-4 rating in completion");
            return *rating;
          },
          [](int rating) { return "rating " + std::to_string(rating); });
      return {out.value >= 3, (out.value - 1) / 3.0, std::move(out.record)};
    }
  }
  return {true, 1.0, std::nullopt};
}

JokeRejectedError::JokeRejectedError(JokeResponse candidate, double score)
    : Error(ErrorCode::JokeRejected, "filter rejected the joke (score " + std::to_string(score) + ")",
            Stage::Filter),
      candidate_(std::move(candidate)), score_(score) {}

JokeResponse generate_joke(std::string_view text, CompletionBackend& backend,
                           const PromptSet& prompts, const PipelineConfig& config) {
  config.validate();
  const PipelineContext ctx{backend, prompts, config};

  JokeResponse response;
  response.topic = validate_topic(text);

  auto handles = select_handles(response.topic, ctx);
  response.handles = handles.value;
  response.trace.push_back(std::move(handles.record));

  auto list_a = generate_associations(response.handles.first, response.topic, Stage::AssociationsA, ctx);
  response.trace.push_back(std::move(list_a.record));
  auto list_b = generate_associations(response.handles.second, response.topic, Stage::AssociationsB, ctx);
  response.trace.push_back(std::move(list_b.record));
  response.associations = {std::move(list_a.value), std::move(list_b.value)};

  auto punch = create_punchline(response.associations.first, response.associations.second, ctx);
  response.punchline = punch.value;
  response.trace.push_back(std::move(punch.record));

  auto angle = generate_angle(response.topic, response.punchline, ctx);
  response.joke_text = angle.value.joke_text;
  response.punchline_intact = angle.value.punchline_intact;
  response.trace.push_back(std::move(angle.record));

  auto verdict = filter_joke(response, ctx);
  if (verdict.record) response.trace.push_back(std::move(*verdict.record));
  if (!verdict.accept) throw JokeRejectedError(std::move(response), verdict.score);
  return response;
}

}  // namespace witscript
