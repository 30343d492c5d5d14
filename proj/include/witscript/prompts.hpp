#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "witscript/error.hpp"

namespace witscript {

/// Template slots. Both association calls share one template.
enum class PromptStage { HandleSelection, Associations, PunchlineCreation, AngleGeneration, Filter };

inline constexpr std::array kRequiredPromptStages{
    PromptStage::HandleSelection, PromptStage::Associations, PromptStage::PunchlineCreation,
    PromptStage::AngleGeneration};

std::string_view to_string(PromptStage stage);
/// File stem used in a prompt directory, e.g. "punchline_creation".
std::string_view file_stem(PromptStage stage);
/// Placeholder names a template for `stage` may reference.
const std::vector<std::string>& allowed_placeholders(PromptStage stage);

using Bindings = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
  PromptStage stage = PromptStage::HandleSelection;
  std::string body;
  std::vector<std::string> few_shot;
};

/// Placeholder names referenced by `body`, in order of first appearance.
/// Throws Error(ParseError) on an unterminated or malformed marker.
std::vector<std::string> placeholders_in(std::string_view body);

/// Few-shot blocks first (verbatim, blank-line separated), then the body with
/// each {name} replaced by its binding and "{{"/"}}" unescaped. Bindings for
/// names the body does not use are ignored.
/// Throws Error(UnknownPlaceholder) / Error(MissingBinding).
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

struct PromptSet {
  std::string version;
  std::map<PromptStage, PromptTemplate> templates;

  const PromptTemplate& at(PromptStage stage) const;
  bool has(PromptStage stage) const { return templates.count(stage) != 0; }
};

/// Parses one template file: sections split on lines that are exactly "---";
/// every section but the last is a few-shot block, the last is the body.
PromptTemplate parse_prompt_file(PromptStage stage, std::string_view content);

/// Checks placeholder use, required stages, and that no template text contains
/// any of `forbidden_topics` (token-run match after normalization).
/// Throws Error(MissingStage | UnknownPlaceholder | HygieneViolation).
/// The hygiene error message names the stage and the 1-based topic index.
void validate_prompt_set(const PromptSet& set, const std::vector<std::string>& forbidden_topics);

/// Loads <stage>.prompt files (and an optional VERSION file) from `dir` and
/// validates them against the bundled evaluation topics.
PromptSet load_prompt_set(const std::filesystem::path& dir);

/// Directory holding the shipped default templates. Honors WITSCRIPT_PROMPTS_DIR,
/// falling back to the install/source location baked in at build time.
std::filesystem::path default_prompts_dir();

}  // namespace witscript
