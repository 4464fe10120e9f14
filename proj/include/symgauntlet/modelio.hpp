#pragma once

// Adapters over the models under test: a chat-completions client with retry
// and a family of deterministic simulated models that make the harness
// verifiable offline, plus a content-addressed response cache.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace symgauntlet::modelio {

struct ModelParams {
  double temperature = 0.0;
  int max_tokens = 256;
  std::string model_name;
  std::string endpoint;  // remote adapters only, e.g. "http://host:port"
};

/// Stable one-line form used in cache keys.
std::string canonical(const ModelParams& params);

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual std::string complete(const std::string& prompt,
                               const ModelParams& params,
                               std::uint64_t trial_nonce) = 0;
  virtual std::string descriptor() const = 0;
};

// What the simulated models understand about a prompt. Exposed so tests can
// pin the parsing rules directly.
enum class PromptKind : int { Arithmetic, WordCount, Story, Unknown };

struct ParsedPrompt {
  PromptKind kind = PromptKind::Unknown;
  std::vector<std::int64_t> terms;        // Arithmetic
  std::int64_t item_count = 0;            // WordCount
  std::int64_t story_start = 0;           // Story
  std::vector<std::string> story_events;  // Story, in prompt order
};

ParsedPrompt parse_prompt(const std::string& prompt);

/// Emitted verbatim when a simulated model cannot make sense of the prompt;
/// extraction downstream yields no integer, so the trial scores incorrect.
inline constexpr const char* kCannotParse = "cannot parse";

/// Answers every parseable prompt exactly: "The answer is <n>."
class PerfectAdder final : public ModelAdapter {
 public:
  std::string complete(const std::string& prompt, const ModelParams& params,
                       std::uint64_t trial_nonce) override;
  std::string descriptor() const override { return "sim:perfect"; }
};

struct SnapConfig {
  std::vector<std::int64_t> snap_targets = {50, 100};
  std::int64_t snap_radius = 10;
  std::int64_t fail_threshold = 35;
  std::uint64_t offset_seed = 0;
};

/// Exact below the failure threshold; beyond it, answers snap to the nearest
/// target within the radius, and otherwise drift by a seeded nonzero offset.
/// Responses are bare integers.
class BiasedSnap final : public ModelAdapter {
 public:
  explicit BiasedSnap(SnapConfig config = {});
  std::string complete(const std::string& prompt, const ModelParams& params,
                       std::uint64_t trial_nonce) override;
  std::string descriptor() const override { return "sim:snap"; }
  const SnapConfig& config() const { return config_; }

 private:
  SnapConfig config_;
};

/// Honors only a window of the input: the first L terms of an expression,
/// the first L listed items, or the first L story events. Story answers
/// recap the honored events so omissions are visible downstream.
class Truncator final : public ModelAdapter {
 public:
  explicit Truncator(std::size_t window);
  std::string complete(const std::string& prompt, const ModelParams& params,
                       std::uint64_t trial_nonce) override;
  std::string descriptor() const override;
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
};

struct RetryPolicy {
  int max_attempts = 5;
  int initial_backoff_ms = 500;
  double backoff_factor = 2.0;
  int max_backoff_ms = 8000;
};

using LogFn = std::function<void(const std::string&)>;

/// Name of the environment variable holding the API credential.
inline constexpr const char* kApiKeyEnvVar = "SYMGAUNTLET_API_KEY";

/// POSTs one user message to <endpoint>/v1/chat/completions and returns the
/// first choice's content. Retries transient failures (connect errors, 429,
/// 5xx) with exponential backoff; every attempt is logged. Construction
/// fails fast when the credential is missing.
class RemoteChatAdapter final : public ModelAdapter {
 public:
  RemoteChatAdapter(std::string model_name, std::string endpoint,
                    RetryPolicy retry = {}, LogFn log = nullptr);
  std::string complete(const std::string& prompt, const ModelParams& params,
                       std::uint64_t trial_nonce) override;
  std::string descriptor() const override { return "remote:" + model_name_; }

 private:
  std::string model_name_;
  std::string endpoint_;
  std::string api_key_;
  RetryPolicy retry_;
  LogFn log_;
};

/// Content-addressed response store. Key = sha256 over (descriptor, prompt,
/// canonical params, trial index); payload files are JSON. A corrupt entry
/// counts as a miss and is rewritten, with a warning tallied.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::string complete(ModelAdapter& adapter, const std::string& prompt,
                       const ModelParams& params, std::uint64_t trial_index);

  static std::string cache_key(const std::string& descriptor,
                               const std::string& prompt,
                               const ModelParams& params,
                               std::uint64_t trial_index);

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }
  std::uint64_t warnings() const { return warnings_.load(); }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> warnings_{0};
};

/// Builds an adapter from a CLI descriptor: sim:perfect, sim:snap,
/// sim:truncate:<L>, or remote:<model-name> (endpoint from base params).
std::unique_ptr<ModelAdapter> make_adapter(const std::string& descriptor,
                                           const ModelParams& base_params);

}  // namespace symgauntlet::modelio
