#include "witscript/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "witscript/corpus.hpp"
#include "witscript/normalize.hpp"

#ifndef WITSCRIPT_DEFAULT_PROMPTS_DIR
#define WITSCRIPT_DEFAULT_PROMPTS_DIR "prompts/default"
#endif

namespace witscript {

std::string_view to_string(PromptStage stage) {
  switch (stage) {
    case PromptStage::HandleSelection: return "HandleSelection";
    case PromptStage::Associations: return "Associations";
    case PromptStage::PunchlineCreation: return "PunchlineCreation";
    case PromptStage::AngleGeneration: return "AngleGeneration";
    case PromptStage::Filter: return "Filter";
  }
  return "Unknown";
}

std::string_view file_stem(PromptStage stage) {
  switch (stage) {
    case PromptStage::HandleSelection: return "handle_selection";
    case PromptStage::Associations: return "associations";
    case PromptStage::PunchlineCreation: return "punchline_creation";
    case PromptStage::AngleGeneration: return "angle_generation";
    case PromptStage::Filter: return "filter";
  }
  return "unknown";
}

const std::vector<std::string>& allowed_placeholders(PromptStage stage) {
  static const std::vector<std::string> handle{"topic"};
  static const std::vector<std::string> assoc{"handle", "topic"};
  static const std::vector<std::string> punch{"assoc_list_a", "assoc_list_b"};
  static const std::vector<std::string> angle{"topic", "punchline"};
  static const std::vector<std::string> filter{"topic", "joke"};
  switch (stage) {
    case PromptStage::HandleSelection: return handle;
    case PromptStage::Associations: return assoc;
    case PromptStage::PunchlineCreation: return punch;
    case PromptStage::AngleGeneration: return angle;
    case PromptStage::Filter: return filter;
  }
  return handle;
}

namespace {

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Walks `body`, calling on_text for literal runs and on_name for markers.
template <typename OnText, typename OnName>
void scan_template(std::string_view body, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == '{') {
      if (i + 1 < body.size() && body[i + 1] == '{') {
        on_text(std::string_view("{"));
        i += 2;
        continue;
      }
      std::size_t j = i + 1;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j == i + 1 || j >= body.size() || body[j] != '}') {
        throw Error(ErrorCode::ParseError,
                    "malformed placeholder at offset " + std::to_string(i));
      }
      on_name(body.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (c == '}') {
      if (i + 1 < body.size() && body[i + 1] == '}') {
        on_text(std::string_view("}"));
        i += 2;
        continue;
      }
      throw Error(ErrorCode::ParseError, "stray '}' at offset " + std::to_string(i));
    } else {
      const std::size_t next = body.find_first_of("{}", i);
      const std::size_t end = next == std::string_view::npos ? body.size() : next;
      on_text(body.substr(i, end - i));
      i = end;
    }
  }
}

void check_placeholders(const PromptTemplate& tmpl) {
  const auto& allowed = allowed_placeholders(tmpl.stage);
  for (const auto& name : placeholders_in(tmpl.body)) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw Error(ErrorCode::UnknownPlaceholder,
                  "placeholder {" + name + "} is not defined for stage " +
                      std::string(to_string(tmpl.stage)));
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string> placeholders_in(std::string_view body) {
  std::vector<std::string> names;
  scan_template(
      body, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
  check_placeholders(tmpl);
  std::string out;
  for (const auto& block : tmpl.few_shot) {
    out += block;
    out += "\n\n";
  }
  scan_template(
      tmpl.body, [&](std::string_view text) { out += text; },
      [&](std::string_view name) {
        const auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw Error(ErrorCode::MissingBinding, "no binding for {" + std::string(name) + "}");
        }
        out += it->second;
      });
  return out;
}

const PromptTemplate& PromptSet::at(PromptStage stage) const {
  const auto it = templates.find(stage);
  if (it == templates.end()) {
    throw Error(ErrorCode::MissingStage,
                "prompt set has no template for " + std::string(to_string(stage)));
  }
  return it->second;
}

PromptTemplate parse_prompt_file(PromptStage stage, std::string_view content) {
  std::vector<std::string> sections(1);
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line == "---") {
      sections.emplace_back();
    } else {
      auto& current = sections.back();
      current.append(line);
      if (eol < content.size()) current.push_back('\n');
    }
    pos = eol + 1;
  }

  PromptTemplate tmpl;
  tmpl.stage = stage;
  for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
    std::string block = trim(sections[i]);
    if (!block.empty()) tmpl.few_shot.push_back(std::move(block));
  }
  tmpl.body = trim(sections.back());
  if (tmpl.body.empty()) {
    throw Error(ErrorCode::ParseError,
                std::string(file_stem(stage)) + ".prompt has an empty body");
  }
  return tmpl;
}

void validate_prompt_set(const PromptSet& set, const std::vector<std::string>& forbidden_topics) {
  for (const auto stage : kRequiredPromptStages) {
    if (!set.has(stage)) {
      throw Error(ErrorCode::MissingStage,
                  "missing template for stage " + std::string(to_string(stage)));
    }
  }
  for (const auto& [stage, tmpl] : set.templates) {
    if (tmpl.stage != stage) {
      throw Error(ErrorCode::ParseError, "template stored under the wrong stage");
    }
    check_placeholders(tmpl);
    std::vector<const std::string*> texts{&tmpl.body};
    for (const auto& block : tmpl.few_shot) texts.push_back(&block);
    for (std::size_t t = 0; t < forbidden_topics.size(); ++t) {
      for (const auto* text : texts) {
        if (contains_token_run(*text, forbidden_topics[t])) {
          throw Error(ErrorCode::HygieneViolation,
                      "template for stage " + std::string(to_string(stage)) +
                          " contains evaluation topic #" + std::to_string(t + 1));
        }
      }
    }
  }
}

PromptSet load_prompt_set(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "prompt directory not found: " + dir.string());
  }
  PromptSet set;
  const auto version_file = dir / "VERSION";
  set.version = std::filesystem::exists(version_file) ? trim(read_file(version_file))
                                                      : dir.filename().string();

  constexpr std::array kAllStages{PromptStage::HandleSelection, PromptStage::Associations,
                                  PromptStage::PunchlineCreation, PromptStage::AngleGeneration,
                                  PromptStage::Filter};
  for (const auto stage : kAllStages) {
    const auto path = dir / (std::string(file_stem(stage)) + ".prompt");
    if (!std::filesystem::exists(path)) {
      if (stage == PromptStage::Filter) continue;
      throw Error(ErrorCode::MissingStage, "missing " + path.filename().string() + " in " + dir.string());
    }
    set.templates.emplace(stage, parse_prompt_file(stage, read_file(path)));
  }
  validate_prompt_set(set, corpus_topics());
  return set;
}

std::filesystem::path default_prompts_dir() {
  if (const char* env = std::getenv("WITSCRIPT_PROMPTS_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return WITSCRIPT_DEFAULT_PROMPTS_DIR;
}

}  // namespace witscript
