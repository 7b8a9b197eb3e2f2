#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tout {

using Verdicts = std::map<std::string, double>;

/// Ordered log of search events. Each event is a JSON object carrying a "type"
/// key (generate, expand, sample, evaluate, select, prune, visit, backtrack,
/// record_output, final, error) plus event-specific fields.
///
/// Not synchronized: concurrent workers log into private transcripts that the
/// owner merges in a fixed order.
class Transcript {
 public:
  void add(std::string_view type, nlohmann::json fields = nlohmann::json::object());
  void append(Transcript&& other);

  const std::vector<nlohmann::json>& events() const noexcept { return events_; }
  std::vector<nlohmann::json>& events() noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }

  /// Events of the given type, in order.
  std::vector<const nlohmann::json*> of_type(std::string_view type) const;

 private:
  std::vector<nlohmann::json> events_;
};

/// One benchmark episode, serialized as a single JSONL line.
struct RunRecord {
  nlohmann::json config;  ///< includes a "digest" member identifying the run configuration
  std::string task;
  std::string problem_id;
  Transcript events;
  std::string final_output;
  Verdicts verdicts;

  /// Timing fields (latency_ms) are the only non-deterministic content; pass
  /// include_timing = false for a canonical form comparable across runs.
  nlohmann::json to_json(bool include_timing = true) const;
  static RunRecord from_json(const nlohmann::json& j);

  std::string config_digest() const;
};

/// Doubles that may be infinite or NaN survive a JSON round trip as strings.
nlohmann::json number_to_json(double value);
double number_from_json(const nlohmann::json& j);

}  // namespace tout
