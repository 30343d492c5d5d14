#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "witscript/backend.hpp"
#include "witscript/prompts.hpp"

namespace witscript::testing {

inline constexpr const char* kWorkedTopic =
    "The U.S. is planning to buy 22 aging fighter jets from Switzerland.";
inline constexpr const char* kWorkedJoke = "I hear they're delicious Swiss Chocolate F-22s.";
inline constexpr const char* kWorkedPunchline = "Swiss Chocolate F-22s";

inline std::vector<ScriptEntry> worked_example_script() {
  return {
      {MatchMode::Substring, std::string("Topic: ") + kWorkedTopic + "\nTopic handles:",
       "1. fighter jets\n2. Switzerland"},
      {MatchMode::Substring, "Subject: fighter jets\n",
       "1. F-22 Raptor\n2. cockpit\n3. afterburner\n4. Top Gun\n5. sonic boom"},
      {MatchMode::Substring, "Subject: Switzerland\n",
       "1. Swiss chocolate\n2. Alps\n3. cuckoo clocks\n4. Swiss army knife\n5. banks"},
      {MatchMode::Substring, "Associations of \"fighter jets\":",
       "A: F-22 Raptor | B: Swiss chocolate | PUNCHLINE: Swiss Chocolate F-22s"},
      {MatchMode::Substring, "Punch line: Swiss Chocolate F-22s\n", kWorkedJoke},
  };
}

inline const PromptSet& default_prompts() {
  static const PromptSet set = load_prompt_set(default_prompts_dir());
  return set;
}

/// Scoped temporary directory.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("witscript-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

/// Scripted fixture for an arbitrary topic, keyed by stage-distinctive
/// substrings of the shipped templates. `tag` must be unique per topic within
/// one script so several topics can share a backend.
struct TopicFixture {
  std::string topic;
  std::string handle_a;
  std::string handle_b;
  std::string tag;
};

inline std::vector<ScriptEntry> script_for(const TopicFixture& f) {
  const std::string item_a = "alpha " + f.tag;
  const std::string item_b = "bravo " + f.tag;
  const std::string punch = "Punch " + f.tag;
  return {
      {MatchMode::Substring, "Topic: " + f.topic + "\nTopic handles:",
       "1. " + f.handle_a + "\n2. " + f.handle_b},
      {MatchMode::Substring, "Topic: " + f.topic + "\nSubject: " + f.handle_a + "\n", "1. " + item_a},
      {MatchMode::Substring, "Topic: " + f.topic + "\nSubject: " + f.handle_b + "\n", "1. " + item_b},
      {MatchMode::Substring, "1. " + item_a + "\n",
       "A: " + item_a + " | B: " + item_b + " | PUNCHLINE: " + punch},
      {MatchMode::Substring, "Punch line: " + punch + "\n", "Joke for " + f.tag + " ends with " + punch + "."},
  };
}

}  // namespace witscript::testing
