#include "tout/uncertainty.hpp"

#include <numeric>

#include "tout/error.hpp"

namespace tout {

bool ranks_before(const ScoredState& a, const ScoredState& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.uncertainty != b.uncertainty) return a.uncertainty < b.uncertainty;
  return a.state->id < b.state->id;
}

std::vector<double> temperature_schedule(int m, double t_min, double t_max) {
  if (m < 1) throw InvalidArgument("temperature_schedule: m must be positive");
  if (!(0.0 <= t_min)) throw InvalidArgument("temperature_schedule: t_min must be non-negative");
  if (t_min > t_max) throw InvalidArgument("temperature_schedule: t_min exceeds t_max");
  std::vector<double> values(static_cast<std::size_t>(m));
  if (m == 1) {
    values[0] = t_min;
    return values;
  }
  const double step = (t_max - t_min) / static_cast<double>(m - 1);
  for (int i = 0; i < m; ++i) values[i] = t_min + static_cast<double>(i) * step;
  values.back() = t_max;
  return values;
}

double aggregate_value(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("aggregate_value: no samples");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double variance(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("variance: no samples");
  const double mean = aggregate_value(samples);
  double sum = 0.0;
  for (double x : samples) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(samples.size());
}

double confidence_score(double value, double uncertainty, double epsilon) noexcept {
  return value / (uncertainty + epsilon);
}

std::vector<double> sample_values(const State& state, std::span<const double> schedule, const Task& task,
                                  Backend& backend, const SearchConfig& config, Transcript& transcript,
                                  int first_draw) {
  if (schedule.empty()) throw InvalidArgument("sample_values: empty temperature schedule");
  const std::string prompt = task.value_prompt(state);
  std::vector<double> values;
  values.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    BackendRequest request;
    request.prompt = prompt;
    request.temperature = schedule[i];
    request.n = 1;
    request.max_tokens = config.max_tokens;
    const int draw = first_draw + static_cast<int>(i);
    BackendResponse response = generate_logged(backend, request, draw, transcript);
    const std::string& text = response.completions.empty() ? std::string{} : response.completions.front();
    const double value = decode_value(task, text);
    values.push_back(value);
    transcript.add("sample", {{"state_id", state.id},
                              {"index", draw},
                              {"temperature", schedule[i]},
                              {"completion", text},
                              {"value", value}});
  }
  return values;
}

ScoredState evaluate_state(const StatePtr& state, const SearchConfig& config, const Task& task,
                           Backend& backend, Transcript& transcript) {
  ScoredState scored;
  scored.state = state;
  scored.temperatures = config.luq_enabled ? temperature_schedule(config.m, config.t_min, config.t_max)
                                           : std::vector<double>{config.t_max};
  scored.samples = sample_values(*state, scored.temperatures, task, backend, config, transcript, 0);
  if (config.two_pass_value) {
    scored.value_samples = sample_values(*state, scored.temperatures, task, backend, config, transcript,
                                         static_cast<int>(scored.temperatures.size()));
    scored.value = aggregate_value(scored.value_samples);
  } else {
    scored.value = aggregate_value(scored.samples);
  }
  scored.uncertainty = variance(scored.samples);
  scored.score = (config.luq_enabled && config.ugs_enabled)
                     ? confidence_score(scored.value, scored.uncertainty, config.epsilon)
                     : scored.value;

  nlohmann::json event{
      {"state_id", state->id},
      {"thoughts", state->thoughts},
      {"value", scored.value},
      {"uncertainty", scored.uncertainty},
      {"score", number_to_json(scored.score)},
      {"samples", scored.samples},
      {"temperatures", scored.temperatures},
  };
  event["parent_id"] = state->parent_id ? nlohmann::json(*state->parent_id) : nlohmann::json(nullptr);
  if (config.two_pass_value) event["value_samples"] = scored.value_samples;
  transcript.add("evaluate", std::move(event));
  return scored;
}

}  // namespace tout
