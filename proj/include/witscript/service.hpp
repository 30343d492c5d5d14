#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "witscript/backend.hpp"
#include "witscript/pipeline.hpp"
#include "witscript/prompts.hpp"

namespace httplib {
class Server;
}

namespace witscript {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8787;
  /// Static UI assets mounted at "/" when set.
  std::optional<std::filesystem::path> static_dir;
  /// Probe the backend once before serving; failures turn /api/joke into 503.
  bool startup_health_check = true;
};

/// Splits "host:port"; throws Error(InvalidArgument).
std::pair<std::string, int> parse_listen_address(const std::string& address);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// HTTP facade over generate_joke. Holds no per-request state.
class JokeService {
 public:
  JokeService(std::shared_ptr<CompletionBackend> backend, std::shared_ptr<const PromptSet> prompts,
              PipelineConfig config, ServiceOptions options = {});
  ~JokeService();

  JokeService(const JokeService&) = delete;
  JokeService& operator=(const JokeService&) = delete;

  /// Request handlers, usable without a socket.
  HttpReply handle_joke(const std::string& request_body) const;
  HttpReply handle_health() const;

  /// Runs the startup probe (if enabled), binds, and serves until stop().
  /// Returns false if the address could not be bound.
  bool listen();
  /// Binds to an ephemeral port on options.host and returns it (-1 on failure);
  /// call serve() afterwards.
  int bind_ephemeral();
  bool serve();
  void stop();
  bool wait_until_ready() const;

  bool backend_available() const { return backend_available_.load(); }

 private:
  void setup_routes();
  void probe_backend();

  std::shared_ptr<CompletionBackend> backend_;
  std::shared_ptr<const PromptSet> prompts_;
  PipelineConfig config_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> backend_available_{true};
};

}  // namespace witscript
