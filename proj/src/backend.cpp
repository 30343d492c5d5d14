#include "witscript/backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "witscript/normalize.hpp"

namespace witscript {

using nlohmann::json;

void CompletionRequest::validate() const {
  if (prompt.empty()) throw Error(ErrorCode::InvalidArgument, "completion prompt is empty");
  if (max_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_tokens must be positive");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be in [0, 2]");
  }
  if (stop_sequences.size() > kMaxStopSequences) {
    throw Error(ErrorCode::InvalidArgument, "at most 4 stop sequences are allowed");
  }
}

// ---------------------------------------------------------------------------

bool ScriptEntry::matches(const std::string& prompt) const {
  switch (match_mode) {
    case MatchMode::Any: return true;
    case MatchMode::Substring: return prompt.find(pattern) != std::string::npos;
    case MatchMode::Exact: return prompt == pattern;
  }
  return false;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries, std::string model_name)
    : entries_(std::move(entries)), consumed_(entries_.size(), false),
      model_name_(std::move(model_name)) {
  for (const auto& e : entries_) {
    if ((e.match_mode == MatchMode::Any) != e.pattern.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "script entry pattern must be empty exactly when match mode is any");
    }
  }
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (consumed_[i] || !entries_[i].matches(request.prompt)) continue;
    consumed_[i] = true;
    transcript_.push_back({request.prompt, entries_[i].response});
    std::string text = trim(entries_[i].response);
    if (text.empty()) throw Error(ErrorCode::EmptyCompletion, "scripted response is empty");
    return {std::move(text), 0};
  }
  throw Error(ErrorCode::ScriptExhausted,
              "no unconsumed script entry matches the prompt (" +
                  std::to_string(transcript_.size()) + " calls served)");
}

std::vector<TranscriptEntry> ScriptedBackend::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

void ScriptedBackend::reset() {
  std::lock_guard lock(mutex_);
  std::fill(consumed_.begin(), consumed_.end(), false);
  transcript_.clear();
}

std::vector<ScriptEntry> parse_script(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("script is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "script must be a JSON array");

  std::vector<ScriptEntry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "script entry " + std::to_string(i);
    if (!item.is_object() || !item.contains("response") || !item["response"].is_string()) {
      throw Error(ErrorCode::ParseError, where + ": needs a string \"response\"");
    }
    ScriptEntry entry;
    const std::string mode = item.value("match", std::string("substring"));
    if (mode == "any") {
      entry.match_mode = MatchMode::Any;
    } else if (mode == "substring") {
      entry.match_mode = MatchMode::Substring;
    } else if (mode == "exact") {
      entry.match_mode = MatchMode::Exact;
    } else {
      throw Error(ErrorCode::ParseError, where + ": unknown match mode \"" + mode + "\"");
    }
    if (item.contains("pattern")) {
      if (!item["pattern"].is_string()) throw Error(ErrorCode::ParseError, where + ": pattern must be a string");
      entry.pattern = item["pattern"].get<std::string>();
    }
    if ((entry.match_mode == MatchMode::Any) != entry.pattern.empty()) {
      throw Error(ErrorCode::ParseError,
                  where + ": pattern must be empty exactly when match is \"any\"");
    }
    entry.response = item["response"].get<std::string>();
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open script file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_script(ss.str());
}

// ---------------------------------------------------------------------------

void BackendConfig::validate() const {
  parse_url(endpoint_url);
  if (model_name.empty()) throw Error(ErrorCode::InvalidArgument, "model name is empty");
  if (max_retries < 0 || max_retries > kMaxBackendRetries) {
    throw Error(ErrorCode::InvalidArgument, "max_retries must be in [0, 5]");
  }
  if (request_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "request timeout must be positive");
  if (retry_backoff_base.count() < 0) throw Error(ErrorCode::InvalidArgument, "retry backoff must be non-negative");
}

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "not an absolute URL: " + url);
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") {
    throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme: " + out.scheme);
  }
  const std::string rest = url.substr(scheme_end + 3);
  const auto path_start = rest.find('/');
  std::string authority = rest.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : rest.substr(path_start);
  out.port = out.scheme == "https" ? 443 : 80;
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    const std::string port = authority.substr(colon + 1);
    if (port.empty() || port.find_first_not_of("0123456789") != std::string::npos || port.size() > 5) {
      throw Error(ErrorCode::InvalidArgument, "bad port in URL: " + url);
    }
    out.port = std::stoi(port);
    authority.resize(colon);
  }
  if (authority.empty()) throw Error(ErrorCode::InvalidArgument, "URL has no host: " + url);
  out.host = authority;
  return out;
}

std::string build_chat_request_body(const CompletionRequest& request,
                                    const std::string& model_name) {
  json body = {
      {"model", model_name},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"n", 1},
  };
  if (!request.stop_sequences.empty()) body["stop"] = request.stop_sequences;
  return body.dump();
}

std::string parse_chat_response_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::ProtocolError, "response body is not JSON");
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty() || !doc["choices"][0].is_object()) {
    throw Error(ErrorCode::ProtocolError, "response has no choices");
  }
  const auto& choice = doc["choices"][0];
  const json* content = nullptr;
  if (choice.contains("message") && choice["message"].is_object() &&
      choice["message"].contains("content")) {
    content = &choice["message"]["content"];
  } else if (choice.contains("text")) {
    content = &choice["text"];
  }
  if (content == nullptr || !(content->is_string() || content->is_null())) {
    throw Error(ErrorCode::ProtocolError, "choice has no text content");
  }
  std::string text = content->is_null() ? std::string() : trim(content->get<std::string>());
  if (text.empty()) throw Error(ErrorCode::EmptyCompletion, "provider returned an empty completion");
  return text;
}

namespace {

std::string read_api_key(const std::string& var) {
  const char* value = std::getenv(var.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::AuthError, "environment variable " + var + " is not set");
  }
  return value;
}

httplib::Client make_client(const ParsedUrl& url, std::chrono::milliseconds timeout) {
  httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

bool is_transient_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

LiveBackend::LiveBackend(BackendConfig config)
    : LiveBackend(config, read_api_key(config.api_key_env_var)) {}

LiveBackend::LiveBackend(BackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  config_.validate();
  url_ = parse_url(config_.endpoint_url);
  if (api_key_.empty()) throw Error(ErrorCode::AuthError, "API key is empty");
}

CompletionResult LiveBackend::complete(const CompletionRequest& request) {
  request.validate();
  const std::string body = build_chat_request_body(request, config_.model_name);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  std::string last_failure;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0) sleep_(config_.retry_backoff_base * (1 << (attempt - 1)));

    auto client = make_client(url_, config_.request_timeout);
    auto res = client.Post(url_.path, headers, body, "application/json");
    if (!res) {
      last_failure = "request failed: " + httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::AuthError, "provider rejected the API key (HTTP " +
                                            std::to_string(res->status) + ")");
    } else if (is_transient_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
    } else if (res->status < 200 || res->status > 299) {
      throw Error(ErrorCode::ProtocolError, "unexpected HTTP " + std::to_string(res->status));
    } else {
      return {parse_chat_response_body(res->body), attempt};
    }
    if (attempt >= config_.max_retries) {
      throw Error(ErrorCode::TransportError,
                  last_failure + " after " + std::to_string(attempt) + " retries");
    }
  }
}

bool LiveBackend::reachable() {
  auto client = make_client(url_, std::min(config_.request_timeout, std::chrono::milliseconds(5000)));
  auto res = client.Get(url_.path);
  return static_cast<bool>(res);
}

}  // namespace witscript
