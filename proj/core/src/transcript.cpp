#include "tout/transcript.hpp"

#include <cmath>
#include <limits>

#include "tout/error.hpp"

namespace tout {

void Transcript::add(std::string_view type, nlohmann::json fields) {
  if (!fields.is_object()) fields = nlohmann::json{{"data", std::move(fields)}};
  fields["type"] = std::string(type);
  events_.push_back(std::move(fields));
}

void Transcript::append(Transcript&& other) {
  events_.insert(events_.end(), std::make_move_iterator(other.events_.begin()),
                 std::make_move_iterator(other.events_.end()));
  other.events_.clear();
}

std::vector<const nlohmann::json*> Transcript::of_type(std::string_view type) const {
  std::vector<const nlohmann::json*> out;
  for (const auto& event : events_) {
    if (event.value("type", "") == type) out.push_back(&event);
  }
  return out;
}

nlohmann::json number_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number", 0);
}

nlohmann::json RunRecord::to_json(bool include_timing) const {
  nlohmann::json events_json = nlohmann::json::array();
  for (const auto& event : events.events()) {
    if (include_timing) {
      events_json.push_back(event);
    } else {
      auto copy = event;
      copy.erase("latency_ms");
      events_json.push_back(std::move(copy));
    }
  }
  nlohmann::json verdicts_json = nlohmann::json::object();
  for (const auto& [name, value] : verdicts) verdicts_json[name] = number_to_json(value);
  return nlohmann::json{
      {"config", config},
      {"task", task},
      {"problem_id", problem_id},
      {"events", std::move(events_json)},
      {"final_output", final_output},
      {"verdicts", std::move(verdicts_json)},
  };
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord record;
  record.config = j.at("config");
  record.task = j.at("task").get<std::string>();
  record.problem_id = j.at("problem_id").get<std::string>();
  for (const auto& event : j.at("events")) record.events.events().push_back(event);
  record.final_output = j.at("final_output").get<std::string>();
  for (const auto& [name, value] : j.at("verdicts").items()) {
    record.verdicts[name] = number_from_json(value);
  }
  return record;
}

std::string RunRecord::config_digest() const {
  if (config.is_object() && config.contains("digest")) return config.at("digest").get<std::string>();
  return {};
}

}  // namespace tout
