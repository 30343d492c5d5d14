#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "witscript/error.hpp"

namespace witscript {

inline constexpr double kDefaultTemperature = 0.8;
inline constexpr int kDefaultMaxTokens = 128;
inline constexpr std::size_t kMaxStopSequences = 4;
inline constexpr int kMaxBackendRetries = 5;
inline constexpr const char* kDefaultApiKeyEnvVar = "WITSCRIPT_API_KEY";

struct CompletionRequest {
  std::string prompt;
  int max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;
  std::vector<std::string> stop_sequences;

  /// Throws Error(InvalidArgument) when a field is out of range.
  void validate() const;
};

struct CompletionResult {
  std::string text;
  /// Transport-level retries spent on this call (never above max_retries).
  int retries = 0;
};

/// A text-completion provider. Implementations are safe to call from several
/// threads at once.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  /// Returns the trimmed completion text. Throws Error with one of AuthError,
  /// TransportError, ProtocolError, EmptyCompletion or ScriptExhausted.
  virtual CompletionResult complete(const CompletionRequest& request) = 0;

  /// "live" or "scripted".
  virtual std::string kind() const = 0;
  virtual std::string model_name() const = 0;

  /// Cheap reachability check used by the service at startup.
  virtual bool reachable() { return true; }
};

// ---------------------------------------------------------------------------
// Scripted backend

enum class MatchMode { Any, Substring, Exact };

struct ScriptEntry {
  MatchMode match_mode = MatchMode::Substring;
  std::string pattern;
  std::string response;

  bool matches(const std::string& prompt) const;
};

struct TranscriptEntry {
  std::string prompt;
  std::string response;
};

/// Replays canned responses. Each call consumes the first unconsumed entry
/// whose pattern matches the prompt; calls are serialized internally and the
/// transcript records them in that order.
class ScriptedBackend final : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> entries,
                           std::string model_name = "scripted");

  CompletionResult complete(const CompletionRequest& request) override;
  std::string kind() const override { return "scripted"; }
  std::string model_name() const override { return model_name_; }

  std::vector<TranscriptEntry> transcript() const;
  std::size_t remaining() const;
  /// Marks every entry unconsumed again and clears the transcript.
  void reset();

 private:
  mutable std::mutex mutex_;
  std::vector<ScriptEntry> entries_;
  std::vector<bool> consumed_;
  std::vector<TranscriptEntry> transcript_;
  std::string model_name_;
};

/// Parses a script document: a JSON array of
/// {"match": "any"|"substring"|"exact", "pattern": ..., "response": ...}.
/// "match" defaults to "substring"; "pattern" may be omitted for "any".
std::vector<ScriptEntry> parse_script(const std::string& json_text);
std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Live chat-completions client

struct BackendConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-3.5-turbo";
  std::string api_key_env_var = kDefaultApiKeyEnvVar;
  std::chrono::milliseconds request_timeout{60'000};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff_base{500};

  void validate() const;
};

struct ParsedUrl {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;
};

/// Accepts absolute http(s) URLs only; throws Error(InvalidArgument).
ParsedUrl parse_url(const std::string& url);

/// Speaks the chat-completions wire protocol: POST {model, messages,
/// temperature, max_tokens[, stop]} with bearer auth, reads
/// choices[0].message.content (or choices[0].text).
class LiveBackend final : public CompletionBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// Reads the API key from the configured environment variable; throws
  /// Error(AuthError) when it is unset or empty.
  explicit LiveBackend(BackendConfig config);
  /// Explicit key, for tests and embedding.
  LiveBackend(BackendConfig config, std::string api_key);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string kind() const override { return "live"; }
  std::string model_name() const override { return config_.model_name; }
  bool reachable() override;

  const BackendConfig& config() const { return config_; }
  void set_sleeper(Sleeper sleeper) { sleep_ = std::move(sleeper); }

 private:
  BackendConfig config_;
  ParsedUrl url_;
  std::string api_key_;
  Sleeper sleep_;
};

/// Builds the JSON request body sent by LiveBackend.
std::string build_chat_request_body(const CompletionRequest& request,
                                    const std::string& model_name);
/// Extracts the completion text from a response body; throws ProtocolError or
/// EmptyCompletion.
std::string parse_chat_response_body(const std::string& body);

}  // namespace witscript
