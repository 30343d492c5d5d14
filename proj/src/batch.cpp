#include "witscript/batch.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

namespace witscript {

std::vector<BatchResult> run_batch(const std::vector<std::string>& topics,
                                   CompletionBackend& backend, const PromptSet& prompts,
                                   const PipelineConfig& config, std::size_t parallelism) {
  std::vector<std::optional<BatchResult>> slots(topics.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < topics.size(); i = next.fetch_add(1)) {
      try {
        slots[i].emplace(generate_joke(topics[i], backend, prompts, config));
      } catch (const Error& e) {
        slots[i].emplace(Error(e));
      } catch (const std::exception& e) {
        slots[i].emplace(Error(ErrorCode::InvalidArgument, e.what()));
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(topics.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::vector<BatchResult> results;
  results.reserve(topics.size());
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

}  // namespace witscript
