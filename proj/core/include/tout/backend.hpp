#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "tout/transcript.hpp"

namespace tout {

/// Fields sent to a chat-completion endpoint.
struct BackendRequest {
  std::string prompt;
  double temperature = 0.7;
  int n = 1;
  int max_tokens = 512;
  std::vector<std::string> stop;

  /// Throws InvalidArgument unless temperature is finite in [0, 2], n >= 1, max_tokens >= 1.
  void validate() const;
  bool operator==(const BackendRequest&) const = default;
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  bool operator==(const TokenUsage&) const = default;
};

struct BackendResponse {
  std::vector<std::string> completions;
  std::optional<TokenUsage> usage;
  /// Completions the provider failed to deliver and that were padded with "".
  int shortfall = 0;
};

/// Temperature rounded to 1e-3 units, as used in every lookup key.
std::int64_t quantize_temperature(double temperature) noexcept;

/// Text-generation boundary.
///
/// `draw` is the client-side index of the first completion within a series of
/// requests for the same prompt; completion j of the response corresponds to
/// draw + j. It never goes on the wire but keeps repeated identical requests
/// (e.g. a flat temperature schedule) distinguishable to caches and test
/// doubles. Implementations must tolerate concurrent generate calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual BackendResponse generate(const BackendRequest& request, int draw = 0) = 0;
};

/// Calls `backend` and logs a "generate" event with latency into `transcript`.
BackendResponse generate_logged(Backend& backend, const BackendRequest& request, int draw,
                                Transcript& transcript);

/// Deterministic table lookup keyed by (prompt digest, quantized temperature,
/// sample index). Unknown keys produce the default text.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::string default_text = "");

  void add(std::string_view prompt, double temperature, int index, std::string completion);
  void add_by_digest(std::string prompt_digest, double temperature, int index, std::string completion);
  void set_default(std::string text) { default_text_ = std::move(text); }

  std::string id() const override { return "scripted"; }
  BackendResponse generate(const BackendRequest& request, int draw = 0) override;

  std::size_t size() const noexcept { return script_.size(); }

  /// {"default": text, "entries": [{"prompt"|"prompt_digest", "temperature", "index", "completion"}]}
  static ScriptedBackend from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Rebuilds the script from the "generate" events of a transcript, so that a
  /// recorded episode can be replayed offline.
  static ScriptedBackend from_transcript(const Transcript& transcript);

 private:
  using Key = std::tuple<std::string, std::int64_t, int>;
  std::map<Key, std::string> script_;
  std::string default_text_;
};

/// Stand-in for an LLM evaluator with known dispersion.
///
/// Prompts follow a small line protocol: the first line is the request kind
/// ("evaluate", "propose" or "final") and a line "state: <key>" names the
/// state. An evaluate request for state s at draw j yields the text of
/// true_value(s) + noise_std(s) * g_j, where g_j is a standard normal drawn
/// from a stream keyed by (seed, s, j). Temperature is ignored.
class SyntheticOracleBackend : public Backend {
 public:
  SyntheticOracleBackend(std::map<std::string, double> true_value,
                         std::map<std::string, double> noise_std, std::uint64_t seed,
                         std::map<std::string, std::string> proposals = {});

  std::string id() const override;
  BackendResponse generate(const BackendRequest& request, int draw = 0) override;

  /// The value sample for `key` at draw `j`.
  double sample(const std::string& key, int j) const;

  static std::string encode_value(double value);
  static std::optional<double> decode_value(std::string_view text);

  static std::string evaluate_prompt(std::string_view key);
  static std::string propose_prompt(std::string_view key, int k);
  static std::string final_prompt(std::string_view key);

 private:
  std::map<std::string, double> true_value_;
  std::map<std::string, double> noise_std_;
  std::map<std::string, std::string> proposals_;
  std::uint64_t seed_;
};

}  // namespace tout
