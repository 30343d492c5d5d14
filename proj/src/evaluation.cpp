#include "witscript/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "witscript/error.hpp"
#include "witscript/normalize.hpp"

namespace witscript {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string strip_bom(std::string line) {
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  return line;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

void require_non_empty(const std::vector<RatingRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no ratings");
}

}  // namespace

std::vector<RatingRecord> parse_ratings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(strip_bom(strip_cr(line))) != "pair_id,rater_id,rating") {
    throw Error(ErrorCode::ParseError, "line 1: expected header pair_id,rater_id,rating");
  }
  std::vector<RatingRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    const auto fields = split_csv_line(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::ParseError, where + ": expected pair_id,rater_id,rating");
    }
    int rating = 0;
    std::size_t used = 0;
    try {
      rating = std::stoi(fields[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != fields[2].size()) {
      throw Error(ErrorCode::ParseError, where + ": rating is not an integer");
    }
    if (rating < kMinRating || rating > kMaxRating) {
      throw Error(ErrorCode::RatingOutOfRange, where + ": rating " + fields[2] + " outside 1..4");
    }
    if (!seen.emplace(fields[0], fields[1]).second) {
      throw Error(ErrorCode::DuplicateRating,
                  where + ": duplicate rating for pair " + fields[0] + " by rater " + fields[1]);
    }
    records.push_back({fields[0], fields[1], rating});
  }
  return records;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_ratings(in);
}

std::map<std::string, Source> parse_pair_sources(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(strip_bom(strip_cr(line))) != "pair_id,source") {
    throw Error(ErrorCode::ParseError, "line 1: expected header pair_id,source");
  }
  std::map<std::string, Source> out;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    line = strip_cr(line);
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(ErrorCode::ParseError, where + ": expected pair_id,source");
    }
    const auto source = source_from_string(fields[1]);
    if (!source) throw Error(ErrorCode::ParseError, where + ": unknown source " + fields[1]);
    if (!out.emplace(fields[0], *source).second) {
      throw Error(ErrorCode::ParseError, where + ": pair " + fields[0] + " listed twice");
    }
  }
  return out;
}

std::map<std::string, Source> load_pair_sources(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_pair_sources(in);
}

double mean_rating(const std::vector<RatingRecord>& records) {
  require_non_empty(records);
  long long sum = 0;
  for (const auto& r : records) sum += r.rating;
  return static_cast<double>(sum) / static_cast<double>(records.size());
}

double pct_jokes(const std::vector<RatingRecord>& records) {
  require_non_empty(records);
  std::size_t jokes = 0;
  for (const auto& r : records) jokes += r.rating >= kJokeThreshold ? 1 : 0;
  return 100.0 * static_cast<double>(jokes) / static_cast<double>(records.size());
}

double round_half_away(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Nudge by a few ulps so values like 2.675 (stored as 2.67499...) round as written.
  const double scaled = value * scale;
  const double nudged = scaled + std::copysign(std::abs(scaled) * 4 * std::numeric_limits<double>::epsilon(), scaled);
  return std::round(nudged) / scale;
}

std::map<Source, double> table2_raw_means(const std::vector<ResponsePair>& pairs) {
  std::map<Source, std::vector<double>> by_source;
  for (const auto& p : pairs) by_source[p.source].push_back(p.mean_rating);
  std::map<Source, double> out;
  for (const auto s : kAllSources) {
    const auto it = by_source.find(s);
    const std::size_t n = it == by_source.end() ? 0 : it->second.size();
    if (n != static_cast<std::size_t>(kCorpusInputs)) {
      throw Error(ErrorCode::ShapeError, "source " + std::string(to_string(s)) + " has " +
                                             std::to_string(n) + " pairs, expected 13");
    }
    double sum = 0.0;
    for (const double m : it->second) sum += m;
    out[s] = sum / static_cast<double>(n);
  }
  if (pairs.size() != static_cast<std::size_t>(kCorpusInputs) * std::size(kAllSources)) {
    throw Error(ErrorCode::ShapeError, "expected 52 pairs");
  }
  return out;
}

std::map<Source, double> table2_from_means(const std::vector<ResponsePair>& pairs) {
  auto means = table2_raw_means(pairs);
  for (auto& [source, mean] : means) mean = round_half_away(mean, 2);
  return means;
}

std::vector<SystemStats> system_stats(const std::vector<RatingRecord>& records,
                                      const std::map<std::string, Source>& pair_sources) {
  std::map<Source, std::vector<RatingRecord>> groups;
  for (const auto& r : records) {
    const auto it = pair_sources.find(r.pair_id);
    if (it == pair_sources.end()) {
      throw Error(ErrorCode::UnknownPair, "pair " + r.pair_id + " has no source mapping");
    }
    groups[it->second].push_back(r);
  }
  std::vector<SystemStats> out;
  for (const auto& [source, group] : groups) {
    out.push_back({source, round_half_away(mean_rating(group), 2), round_half_away(pct_jokes(group), 2)});
  }
  return out;
}

std::vector<std::size_t> presentation_order(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptyInput, "nothing to order");
  std::mt19937_64 rng(seed);
  // Unbiased draw in [0, bound] by rejection.
  auto draw = [&rng](std::uint64_t bound) {
    if (bound == 0) return std::uint64_t{0};
    const std::uint64_t range = bound + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = 0;
    do {
      x = rng();
    } while (x >= limit);
    return x % range;
  };
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(draw(i))]);
  }
  return order;
}

double published_pct_jokes(Source source) {
  switch (source) {
    case Source::Baseline: return 25.1;
    case Source::Witscript: return 47.2;
    case Source::Witscript2: return 46.2;
    case Source::Human: return 70.3;
  }
  return 0.0;
}

std::string format_stats_table(const std::vector<SystemStats>& stats) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "System" << std::right << std::setw(12) << "Mean rating"
      << std::setw(10) << "% jokes" << '\n';
  out << std::fixed;
  for (const auto& s : stats) {
    out << std::left << std::setw(14) << display_name(s.source) << std::right << std::setw(12)
        << std::setprecision(2) << round_half_away(s.mean_rating, 2) << std::setw(10)
        << std::setprecision(1) << round_half_away(s.pct_jokes, 1) << '\n';
  }
  return out.str();
}

}  // namespace witscript
