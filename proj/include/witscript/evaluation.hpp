#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "witscript/corpus.hpp"

namespace witscript {

inline constexpr int kMinRating = 1;  // not a joke
inline constexpr int kMaxRating = 4;  // a very good joke
inline constexpr int kJokeThreshold = 3;

struct RatingRecord {
  std::string pair_id;
  std::string rater_id;
  int rating = kMinRating;
};

struct SystemStats {
  Source source = Source::Baseline;
  double mean_rating = 0.0;
  double pct_jokes = 0.0;
};

/// Parses "pair_id,rater_id,rating" CSV (header required). Throws
/// Error(ParseError | RatingOutOfRange | DuplicateRating); messages carry the
/// 1-based line number.
std::vector<RatingRecord> parse_ratings(std::istream& in);
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);

/// Parses "pair_id,source" CSV mapping each pair to the system that produced it.
std::map<std::string, Source> parse_pair_sources(std::istream& in);
std::map<std::string, Source> load_pair_sources(const std::filesystem::path& path);

/// Arithmetic mean of the ratings. Throws Error(EmptyInput).
double mean_rating(const std::vector<RatingRecord>& records);
/// Percentage of ratings >= 3. Throws Error(EmptyInput).
double pct_jokes(const std::vector<RatingRecord>& records);

/// Round half away from zero to `decimals` places.
double round_half_away(double value, int decimals = 2);

/// Unrounded mean of per-response means for each source.
/// Throws Error(ShapeError) unless every source has exactly 13 pairs.
std::map<Source, double> table2_raw_means(const std::vector<ResponsePair>& pairs);
/// table2_raw_means rounded to 2 decimals.
std::map<Source, double> table2_from_means(const std::vector<ResponsePair>& pairs);

/// Groups ratings by source; one entry per source present, in Source order.
/// Both statistics are rounded half away from zero to 2 decimals.
/// Throws Error(UnknownPair).
std::vector<SystemStats> system_stats(const std::vector<RatingRecord>& records,
                                      const std::map<std::string, Source>& pair_sources);

/// Fisher-Yates shuffle of [0, n) driven by std::mt19937_64(seed) with
/// rejection-sampled bounded draws, so the order is identical on every
/// platform. Throws Error(EmptyInput) for n == 0.
std::vector<std::size_t> presentation_order(std::size_t n, std::uint64_t seed);

template <typename T>
std::vector<std::size_t> presentation_order(const std::vector<T>& pairs, std::uint64_t seed) {
  return presentation_order(pairs.size(), seed);
}

/// Reference %-jokes values of the original study. They cannot be recomputed
/// from the published per-response means and are used for display only.
double published_pct_jokes(Source source);

/// Aligned-column text table: System, Mean rating, % jokes.
std::string format_stats_table(const std::vector<SystemStats>& stats);

}  // namespace witscript
