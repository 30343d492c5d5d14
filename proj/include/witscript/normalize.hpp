#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace witscript {

/// Canonical form used for every text comparison in the project:
/// NFC, lowercase, each non-alphanumeric code point replaced by a space,
/// space runs collapsed, trimmed. Idempotent. Invalid UTF-8 sequences are
/// treated as non-alphanumeric.
std::string normalize_for_match(std::string_view text);

/// Space-separated tokens of normalize_for_match(text).
std::vector<std::string> match_tokens(std::string_view text);

/// True iff the normalized joke ends with the normalized punch line on a
/// token boundary. An empty (or all-punctuation) punch line never matches.
bool ends_with_punchline(std::string_view joke_text, std::string_view punchline_text);

/// True iff the normalized handle is a contiguous token run of the normalized
/// topic.
bool handle_occurs_in_topic(std::string_view handle, std::string_view topic_text);

/// Same token-run test over arbitrary text; used by the prompt hygiene check.
bool contains_token_run(std::string_view haystack, std::string_view needle);

/// Whitespace trim (ASCII whitespace only).
std::string trim(std::string_view text);

/// Whitespace-separated tokens of the raw text.
std::vector<std::string> split_whitespace(std::string_view text);

/// Number of Unicode code points, counting each invalid byte as one.
std::size_t utf8_length(std::string_view text);

}  // namespace witscript
