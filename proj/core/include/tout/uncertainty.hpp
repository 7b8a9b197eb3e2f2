#pragma once

#include <span>
#include <vector>

#include "tout/backend.hpp"
#include "tout/config.hpp"
#include "tout/state.hpp"
#include "tout/task.hpp"
#include "tout/transcript.hpp"

namespace tout {

/// A state annotated with its Monte Carlo value estimate.
///
/// uncertainty is the population variance of `samples`; score is the
/// selection key, value / (uncertainty + epsilon) when uncertainty-aware search
/// is on and value alone otherwise.
struct ScoredState {
  StatePtr state;
  double value = 0.0;
  double uncertainty = 0.0;
  double score = 0.0;
  std::vector<double> samples;
  std::vector<double> temperatures;
  /// Only filled in two-pass mode, where value comes from a second sample set.
  std::vector<double> value_samples;
};

/// Strict ordering used for every selection: higher score first, then lower
/// uncertainty, then lower state id.
bool ranks_before(const ScoredState& a, const ScoredState& b) noexcept;

/// m temperatures linearly interpolated from t_min to t_max (just t_min when m = 1).
std::vector<double> temperature_schedule(int m, double t_min, double t_max);

/// Population variance; throws InvalidArgument on an empty span.
double variance(std::span<const double> samples);

/// Arithmetic mean; throws InvalidArgument on an empty span.
double aggregate_value(std::span<const double> samples);

/// value / (uncertainty + epsilon).
double confidence_score(double value, double uncertainty, double epsilon) noexcept;

/// Issues the task's value prompt once per schedule entry and decodes each
/// completion. Logs one "sample" event per draw.
std::vector<double> sample_values(const State& state, std::span<const double> schedule,
                                  const Task& task, Backend& backend, const SearchConfig& config,
                                  Transcript& transcript, int first_draw = 0);

/// Temperature schedule, value samples, mean, variance and score for one state.
/// With LUQ off a single sample is drawn at t_max and uncertainty is 0; with
/// UGS off the score is the plain value. Logs an "evaluate" event.
ScoredState evaluate_state(const StatePtr& state, const SearchConfig& config, const Task& task,
                           Backend& backend, Transcript& transcript);

}  // namespace tout
