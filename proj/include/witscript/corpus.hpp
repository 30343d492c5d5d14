#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace witscript {

/// Which system produced a response in the rating study.
enum class Source { Baseline, Witscript, Witscript2, Human };

inline constexpr Source kAllSources[] = {Source::Baseline, Source::Witscript, Source::Witscript2,
                                         Source::Human};

/// Stable key: "baseline", "witscript", "witscript2", "human".
std::string_view to_string(Source source);
/// Display label used in stats tables ("GPT-3", "Witscript", "Witscript 2", "Human").
std::string_view display_name(Source source);
std::optional<Source> source_from_string(std::string_view key);

inline constexpr int kCorpusInputs = 13;

struct ResponsePair {
  int input_id = 0;  // 1..13
  Source source = Source::Baseline;
  std::string input_text;
  std::string response_text;
  double mean_rating = 0.0;
};

/// The 13 inputs x 4 systems rated in the original study, byte-exact, ordered
/// by input then by source.
const std::vector<ResponsePair>& bundled_corpus();

/// The 13 distinct input sentences, index 0 = input 1.
const std::vector<std::string>& corpus_topics();

/// The raw embedded JSON document the corpus is parsed from.
std::string_view corpus_json();

}  // namespace witscript
