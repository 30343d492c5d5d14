#include "witscript/corpus.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "corpus_data.hpp"

namespace witscript {

std::string_view to_string(Source source) {
  switch (source) {
    case Source::Baseline: return "baseline";
    case Source::Witscript: return "witscript";
    case Source::Witscript2: return "witscript2";
    case Source::Human: return "human";
  }
  return "unknown";
}

std::string_view display_name(Source source) {
  switch (source) {
    case Source::Baseline: return "GPT-3";
    case Source::Witscript: return "Witscript";
    case Source::Witscript2: return "Witscript 2";
    case Source::Human: return "Human";
  }
  return "unknown";
}

std::optional<Source> source_from_string(std::string_view key) {
  for (const auto s : kAllSources) {
    if (to_string(s) == key) return s;
  }
  return std::nullopt;
}

std::string_view corpus_json() { return detail::kCorpusJson; }

const std::vector<ResponsePair>& bundled_corpus() {
  static const std::vector<ResponsePair> pairs = [] {
    const auto doc = nlohmann::json::parse(corpus_json());
    std::vector<ResponsePair> out;
    out.reserve(doc.size());
    for (const auto& item : doc) {
      const auto source = source_from_string(item.at("source").get<std::string>());
      if (!source) throw std::logic_error("embedded corpus has an unknown source");
      out.push_back({item.at("input_id").get<int>(), *source,
                     item.at("input_text").get<std::string>(),
                     item.at("response_text").get<std::string>(),
                     item.at("mean_rating").get<double>()});
    }
    std::stable_sort(out.begin(), out.end(), [](const ResponsePair& a, const ResponsePair& b) {
      return a.input_id != b.input_id ? a.input_id < b.input_id : a.source < b.source;
    });
    return out;
  }();
  return pairs;
}

const std::vector<std::string>& corpus_topics() {
  static const std::vector<std::string> topics = [] {
    std::vector<std::string> out(kCorpusInputs);
    for (const auto& p : bundled_corpus()) out.at(static_cast<std::size_t>(p.input_id - 1)) = p.input_text;
    return out;
  }();
  return topics;
}

}  // namespace witscript
