#include "witscript/normalize.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <stdexcept>

namespace witscript {

namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *instance;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool token_run_at(const std::vector<std::string>& hay, std::size_t pos,
                  const std::vector<std::string>& needle) {
  return std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(pos));
}

}  // namespace

std::string normalize_for_match(std::string_view text) {
  // fromUTF8 maps ill-formed sequences to U+FFFD, which is not alphanumeric.
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString composed = nfc().normalize(source, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalization failed");
  }
  composed.toLower(icu::Locale::getRoot());

  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (int32_t i = 0; i < composed.length();) {
    const UChar32 cp = composed.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isalnum(cp)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      char buf[U8_MAX_LENGTH];
      int32_t len = 0;
      U8_APPEND_UNSAFE(buf, len, cp);
      out.append(buf, static_cast<std::size_t>(len));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> match_tokens(std::string_view text) {
  return split_whitespace(normalize_for_match(text));
}

bool ends_with_punchline(std::string_view joke_text, std::string_view punchline_text) {
  const std::string punch = normalize_for_match(punchline_text);
  if (punch.empty()) return false;
  const std::string joke = normalize_for_match(joke_text);
  if (joke.size() < punch.size()) return false;
  if (joke.compare(joke.size() - punch.size(), punch.size(), punch) != 0) return false;
  return joke.size() == punch.size() || joke[joke.size() - punch.size() - 1] == ' ';
}

bool contains_token_run(std::string_view haystack, std::string_view needle) {
  const auto needle_tokens = match_tokens(needle);
  if (needle_tokens.empty()) return false;
  const auto hay_tokens = match_tokens(haystack);
  if (hay_tokens.size() < needle_tokens.size()) return false;
  for (std::size_t pos = 0; pos + needle_tokens.size() <= hay_tokens.size(); ++pos) {
    if (token_run_at(hay_tokens, pos, needle_tokens)) return true;
  }
  return false;
}

bool handle_occurs_in_topic(std::string_view handle, std::string_view topic_text) {
  return contains_token_run(topic_text, handle);
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_ascii_space(text[begin])) ++begin;
  while (end > begin && is_ascii_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t count = 0;
  int32_t i = 0;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  while (i < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, i, length, cp);
    ++count;
  }
  return count;
}

}  // namespace witscript
