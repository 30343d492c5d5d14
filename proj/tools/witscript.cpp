// witscript: command-line front end for joke generation, batch runs, rating
// statistics, the bundled corpus, and the HTTP service.
//
// Exit codes: 0 success, 1 validation/input error, 2 backend/stage/I-O error.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "witscript/batch.hpp"
#include "witscript/corpus.hpp"
#include "witscript/evaluation.hpp"
#include "witscript/normalize.hpp"
#include "witscript/pipeline.hpp"
#include "witscript/prompts.hpp"
#include "witscript/serialize.hpp"
#include "witscript/service.hpp"

namespace {

using namespace witscript;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBackend = 2;

struct GlobalOptions {
  std::string backend = "live";
  std::string model;
  std::string endpoint;
  std::string api_key_env = kDefaultApiKeyEnvVar;
  int timeout_ms = 60'000;
  int max_retries = 2;
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
  int k = 5;
  int retries = 2;
  bool strict_punchline = false;
  std::string filter = "off";
  std::string prompts_dir;
  std::uint64_t seed = 0;
  bool trace = false;
  bool json = false;
};

int exit_code_for(const Error& e) { return e.is_validation_error() ? kExitInput : kExitBackend; }

void print_error(const Error& e) {
  std::cerr << "error: " << to_string(e.code());
  if (e.stage()) std::cerr << " [stage " << to_string(*e.stage()) << "]";
  std::cerr << ": " << e.what() << '\n';
}

std::shared_ptr<CompletionBackend> make_backend(const GlobalOptions& opts) {
  const std::string scripted_prefix = "scripted:";
  if (opts.backend.rfind(scripted_prefix, 0) == 0) {
    const std::string path = opts.backend.substr(scripted_prefix.size());
    return std::make_shared<ScriptedBackend>(load_script(path),
                                             opts.model.empty() ? "scripted" : opts.model);
  }
  if (opts.backend != "live") {
    throw Error(ErrorCode::InvalidArgument, "--backend must be live or scripted:<file>");
  }
  BackendConfig config;
  if (!opts.model.empty()) config.model_name = opts.model;
  if (!opts.endpoint.empty()) config.endpoint_url = opts.endpoint;
  config.api_key_env_var = opts.api_key_env;
  config.request_timeout = std::chrono::milliseconds(opts.timeout_ms);
  config.max_retries = opts.max_retries;
  return std::make_shared<LiveBackend>(config);
}

PipelineConfig make_pipeline_config(const GlobalOptions& opts) {
  PipelineConfig config;
  config.associations_per_handle = opts.k;
  config.retries_per_stage = opts.retries;
  config.strict_punchline = opts.strict_punchline;
  const auto policy = filter_policy_from_string(opts.filter);
  if (!policy) throw Error(ErrorCode::InvalidArgument, "--filter must be off, heuristic or model");
  config.filter_policy = *policy;
  config.default_decoding.temperature = opts.temperature;
  config.default_decoding.max_tokens = opts.max_tokens;
  config.validate();
  return config;
}

std::shared_ptr<const PromptSet> make_prompts(const GlobalOptions& opts) {
  return std::make_shared<const PromptSet>(
      load_prompt_set(opts.prompts_dir.empty() ? default_prompts_dir() : std::filesystem::path(opts.prompts_dir)));
}

void print_trace(std::ostream& out, const JokeResponse& r) {
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& rec = r.trace[i];
    out << "  [" << i + 1 << "] " << to_string(rec.stage) << " (attempts " << rec.attempts
        << "): " << rec.parsed_summary << '\n';
  }
}

void print_joke(const GlobalOptions& opts, const JokeResponse& r, bool trace) {
  if (opts.json) {
    std::cout << to_json(r, trace).dump() << '\n';
    return;
  }
  std::cout << r.joke_text << '\n';
  if (trace) print_trace(std::cout, r);
}

int cmd_joke(const GlobalOptions& opts, const std::string& text) {
  try {
    // Validate before touching the backend so bad input never needs a key.
    validate_topic(text);
    const auto prompts = make_prompts(opts);
    const auto config = make_pipeline_config(opts);
    const auto backend = make_backend(opts);
    print_joke(opts, generate_joke(text, *backend, *prompts, config), opts.trace);
    return kExitOk;
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e);
  }
}

int cmd_chat(const GlobalOptions& opts) {
  std::shared_ptr<const PromptSet> prompts;
  PipelineConfig config;
  std::shared_ptr<CompletionBackend> backend;
  try {
    prompts = make_prompts(opts);
    config = make_pipeline_config(opts);
    backend = make_backend(opts);
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e);
  }

  bool trace = opts.trace;
  std::string line;
  std::cerr << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    const std::string input = trim(line);
    if (input == ":quit" || input == ":q") return kExitOk;
    if (input == ":trace") {
      trace = !trace;
      std::cerr << "trace " << (trace ? "on" : "off") << '\n';
    } else if (!input.empty()) {
      try {
        print_joke(opts, generate_joke(input, *backend, *prompts, config), trace);
      } catch (const Error& e) {
        print_error(e);
      }
      std::cout << std::flush;
    }
    std::cerr << "> " << std::flush;
  }
  return kExitOk;
}

int cmd_batch(const GlobalOptions& opts, const std::string& input_path,
              const std::string& output_path, int parallel) {
  std::vector<std::string> topics;
  {
    std::ifstream in(input_path);
    if (!in) {
      std::cerr << "error: IoError: cannot open " << input_path << '\n';
      return kExitBackend;
    }
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      topics.push_back(line);
    }
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (output_path != "-") {
    file_out.open(output_path, std::ios::binary | std::ios::trunc);
    if (!file_out) {
      std::cerr << "error: IoError: cannot write " << output_path << '\n';
      return kExitBackend;
    }
    out = &file_out;
  }
  if (topics.empty()) return kExitOk;

  std::shared_ptr<const PromptSet> prompts;
  PipelineConfig config;
  std::shared_ptr<CompletionBackend> backend;
  try {
    prompts = make_prompts(opts);
    config = make_pipeline_config(opts);
    backend = make_backend(opts);
  } catch (const Error& e) {
    print_error(e);
    return kExitBackend;
  }

  const auto results = run_batch(topics, *backend, *prompts, config,
                                 static_cast<std::size_t>(std::max(parallel, 1)));
  bool all_ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (const auto* joke = std::get_if<JokeResponse>(&results[i])) {
      *out << to_json(*joke, opts.trace).dump() << '\n';
    } else {
      const auto& err = std::get<Error>(results[i]);
      auto record = error_to_json(err);
      record["line"] = i + 1;
      record["input"] = topics[i];
      *out << record.dump() << '\n';
      all_ok = false;
    }
  }
  out->flush();
  if (!*out) {
    std::cerr << "error: IoError: write failed\n";
    return kExitBackend;
  }
  return all_ok ? kExitOk : kExitInput;
}

int cmd_eval(const GlobalOptions& opts, const std::string& ratings_path,
             const std::string& pairs_path, bool from_table1) {
  try {
    if (from_table1) {
      const auto means = table2_from_means(bundled_corpus());
      if (opts.json) {
        json rows = json::array();
        for (const auto& [source, mean] : means) {
          rows.push_back({{"source", to_string(source)}, {"system", display_name(source)},
                          {"mean_rating", mean}, {"pct_jokes", nullptr},
                          {"pct_jokes_note", "n/a (raw ratings unpublished)"}});
        }
        std::cout << rows.dump(2) << '\n';
      } else {
        std::printf("%-14s%12s  %s\n", "System", "Mean rating", "% jokes");
        for (const auto& [source, mean] : means) {
          std::printf("%-14s%12.2f  %s\n", std::string(display_name(source)).c_str(), mean,
                      "n/a (raw ratings unpublished)");
        }
      }
      return kExitOk;
    }
    if (ratings_path.empty() || pairs_path.empty()) {
      std::cerr << "error: eval needs RATINGS and PAIRS files (or --from-table1)\n";
      return kExitInput;
    }
    const auto records = load_ratings(ratings_path);
    const auto sources = load_pair_sources(pairs_path);
    const auto stats = system_stats(records, sources);
    if (opts.json) {
      std::cout << to_json(stats).dump(2) << '\n';
    } else {
      std::cout << format_stats_table(stats);
    }
    return kExitOk;
  } catch (const Error& e) {
    print_error(e);
    return kExitInput;
  }
}

int cmd_corpus(int input_id) {
  if (input_id != 0 && (input_id < 1 || input_id > kCorpusInputs)) {
    std::cerr << "error: unknown input id " << input_id << " (expected 1-" << kCorpusInputs << ")\n";
    return kExitInput;
  }
  json out = json::array();
  for (const auto& pair : bundled_corpus()) {
    if (input_id == 0 || pair.input_id == input_id) out.push_back(to_json(pair));
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_order(const GlobalOptions& opts, int count) {
  try {
    const auto n = count > 0 ? static_cast<std::size_t>(count) : bundled_corpus().size();
    const auto order = presentation_order(n, opts.seed);
    if (opts.json) {
      std::cout << json(order).dump() << '\n';
    } else {
      for (const auto i : order) std::cout << i << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    print_error(e);
    return kExitInput;
  }
}

JokeService* g_service = nullptr;

extern "C" void handle_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

int cmd_serve(const GlobalOptions& opts, const std::string& listen, const std::string& static_dir,
              bool skip_health_check) {
  try {
    const auto [host, port] = parse_listen_address(listen);
    ServiceOptions options;
    options.host = host;
    options.port = port;
    options.startup_health_check = !skip_health_check;
    if (!static_dir.empty()) options.static_dir = static_dir;
    JokeService service(make_backend(opts), make_prompts(opts), make_pipeline_config(opts), options);
    g_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cerr << "listening on http://" << host << ':' << port << '\n';
    const bool ok = service.listen();
    g_service = nullptr;
    if (!ok) {
      std::cerr << "error: could not listen on " << listen << '\n';
      return kExitBackend;
    }
    return kExitOk;
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joke generation from a single topic sentence"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--backend", opts.backend, "live | scripted:<script.json>")->capture_default_str();
  app.add_option("--model", opts.model, "Model name sent to the provider");
  app.add_option("--endpoint", opts.endpoint, "Chat-completions endpoint URL");
  app.add_option("--api-key-env", opts.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  app.add_option("--timeout-ms", opts.timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);
  app.add_option("--max-retries", opts.max_retries, "Transport retries per backend call")
      ->check(CLI::Range(0, kMaxBackendRetries));
  app.add_option("--temperature", opts.temperature)->check(CLI::Range(0.0, 2.0))->capture_default_str();
  app.add_option("--max-tokens", opts.max_tokens)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--k", opts.k, "Associations kept per handle")->check(CLI::Range(1, 10))->capture_default_str();
  app.add_option("--retries", opts.retries, "Re-prompts per stage")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_flag("--strict-punchline", opts.strict_punchline, "Fail when the joke drops its punch line");
  app.add_option("--filter", opts.filter, "off | heuristic | model")->capture_default_str();
  app.add_option("--prompts-dir", opts.prompts_dir, "Directory of <stage>.prompt files");
  app.add_option("--seed", opts.seed, "Seed for presentation order")->capture_default_str();
  app.add_flag("--trace", opts.trace, "Show the stage trace");
  app.add_flag("--json", opts.json, "Emit JSON");

  int rc = kExitOk;

  std::string joke_text;
  auto* joke = app.add_subcommand("joke", "Generate one joke");
  joke->add_option("text", joke_text, "Topic sentence")->required();
  joke->callback([&] { rc = cmd_joke(opts, joke_text); });

  auto* chat = app.add_subcommand("chat", "Line-oriented chat (:trace toggles trace, :quit exits)");
  chat->callback([&] { rc = cmd_chat(opts); });

  std::string batch_in;
  std::string batch_out = "-";
  int parallel = 1;
  auto* batch = app.add_subcommand("batch", "One joke per input line, JSON lines out");
  batch->add_option("input", batch_in, "Topics file")->required();
  batch->add_option("output", batch_out, "Output file ('-' for stdout)")->capture_default_str();
  batch->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  batch->callback([&] { rc = cmd_batch(opts, batch_in, batch_out, parallel); });

  std::string ratings_path;
  std::string pairs_path;
  bool from_table1 = false;
  auto* eval = app.add_subcommand("eval", "Per-system rating statistics");
  eval->add_option("ratings", ratings_path, "CSV: pair_id,rater_id,rating");
  eval->add_option("pairs", pairs_path, "CSV: pair_id,source");
  eval->add_flag("--from-table1", from_table1, "Mean of the bundled per-response means");
  eval->callback([&] { rc = cmd_eval(opts, ratings_path, pairs_path, from_table1); });

  int input_id = 0;
  auto* corpus = app.add_subcommand("corpus", "Dump the bundled rated corpus as JSON");
  corpus->add_option("--input", input_id, "Only this input's responses (1-13)");
  corpus->callback([&] { rc = cmd_corpus(input_id); });

  int order_count = 0;
  auto* order = app.add_subcommand("order", "Seeded presentation order for a rating study");
  order->add_option("--count", order_count, "Number of pairs (default: the 52 corpus pairs)");
  order->callback([&] { rc = cmd_order(opts, order_count); });

  std::string listen = "127.0.0.1:8787";
  std::string static_dir;
  bool skip_health = false;
  auto* serve = app.add_subcommand("serve", "HTTP API and static chat UI");
  serve->add_option("--listen", listen, "host:port")->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Directory served at /");
  serve->add_flag("--no-health-check", skip_health, "Skip the startup backend probe");
  serve->callback([&] { rc = cmd_serve(opts, listen, static_dir, skip_health); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  return rc;
}
