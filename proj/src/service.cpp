#include "witscript/service.hpp"

#include <httplib.h>

#include <iostream>

#include "witscript/serialize.hpp"

namespace witscript {

using nlohmann::json;

std::pair<std::string, int> parse_listen_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw Error(ErrorCode::InvalidArgument, "listen address must be host:port, got " + address);
  }
  const std::string port_text = address.substr(colon + 1);
  if (port_text.find_first_not_of("0123456789") != std::string::npos || port_text.size() > 5) {
    throw Error(ErrorCode::InvalidArgument, "bad port in listen address " + address);
  }
  const int port = std::stoi(port_text);
  if (port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range in " + address);
  return {address.substr(0, colon), port};
}

namespace {

HttpReply error_reply(int status, const Error& e) { return {status, error_to_json(e).dump()}; }

}  // namespace

JokeService::JokeService(std::shared_ptr<CompletionBackend> backend,
                         std::shared_ptr<const PromptSet> prompts, PipelineConfig config,
                         ServiceOptions options)
    : backend_(std::move(backend)), prompts_(std::move(prompts)), config_(std::move(config)),
      options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  config_.validate();
  setup_routes();
}

JokeService::~JokeService() { stop(); }

HttpReply JokeService::handle_joke(const std::string& request_body) const {
  if (!backend_available_.load()) {
    return error_reply(503, Error(ErrorCode::TransportError, "backend was unreachable at startup"));
  }
  json body;
  try {
    body = json::parse(request_body);
  } catch (const json::parse_error&) {
    return error_reply(400, Error(ErrorCode::InvalidArgument, "request body is not JSON"));
  }
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    return error_reply(400, Error(ErrorCode::InvalidArgument, "request needs a string \"text\" field"));
  }
  if (body.contains("trace") && !body["trace"].is_boolean()) {
    return error_reply(400, Error(ErrorCode::InvalidArgument, "\"trace\" must be a boolean"));
  }
  const bool want_trace = body.value("trace", false);

  try {
    const auto response = generate_joke(body["text"].get<std::string>(), *backend_, *prompts_, config_);
    return {200, to_json(response, want_trace).dump()};
  } catch (const Error& e) {
    return error_reply(e.is_validation_error() ? 400 : 502, e);
  }
}

HttpReply JokeService::handle_health() const {
  json body = {{"status", "ok"},
               {"backend_kind", backend_->kind()},
               {"model_name", backend_->model_name()},
               {"backend_available", backend_available_.load()}};
  return {200, body.dump()};
}

void JokeService::setup_routes() {
  server_->Post("/api/joke", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle_joke(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  });
  server_->Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
    const auto reply = handle_health();
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  });
  if (options_.static_dir) {
    if (!server_->set_mount_point("/", options_.static_dir->string())) {
      std::cerr << "warning: static directory " << *options_.static_dir << " not found\n";
    }
  }
}

void JokeService::probe_backend() {
  if (!options_.startup_health_check) return;
  bool ok = false;
  try {
    ok = backend_->reachable();
  } catch (const std::exception&) {
    ok = false;
  }
  backend_available_.store(ok);
  if (!ok) std::cerr << "warning: backend unreachable; /api/joke will answer 503\n";
}

bool JokeService::listen() {
  probe_backend();
  return server_->listen(options_.host, options_.port);
}

int JokeService::bind_ephemeral() {
  probe_backend();
  return server_->bind_to_any_port(options_.host);
}

bool JokeService::serve() { return server_->listen_after_bind(); }

void JokeService::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool JokeService::wait_until_ready() const {
  server_->wait_until_ready();
  return server_->is_running();
}

}  // namespace witscript
