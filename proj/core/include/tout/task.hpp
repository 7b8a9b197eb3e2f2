#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tout/state.hpp"
#include "tout/transcript.hpp"

namespace tout {

/// Contract every task plugin implements. A Task instance is bound to one
/// problem (its input and ground truth).
///
/// parse_proposals must return at most k thoughts. parse_value must be total:
/// anything it cannot read maps to min_value().
class Task {
 public:
  virtual ~Task() = default;

  virtual std::string name() const = 0;
  virtual std::string problem_id() const = 0;
  /// The problem statement x placed in the root state.
  virtual std::string input() const = 0;
  /// Default global step budget T.
  virtual int max_steps() const = 0;

  // Thought generator G.
  virtual std::string propose_prompt(const State& state, int k) const = 0;
  virtual std::vector<std::string> parse_proposals(const State& state, std::string_view completion,
                                                   int k) const = 0;

  // State evaluator V.
  virtual std::string value_prompt(const State& state) const = 0;
  virtual double parse_value(std::string_view completion) const = 0;
  virtual double min_value() const = 0;

  /// True when the state is a complete solution attempt and cannot be expanded.
  virtual bool is_terminal(const State& state) const = 0;

  /// Prompt for the closing G(s, 1) call and the output text derived from it.
  virtual std::string final_prompt(const State& state) const = 0;
  virtual std::string final_output(const State& state, std::string_view completion) const = 0;

  // Non-tree baselines.
  virtual std::string io_prompt() const = 0;
  virtual std::string cot_prompt() const = 0;
  virtual std::optional<std::string> extract_answer(std::string_view completion) const = 0;
  virtual std::string canonicalize_answer(std::string_view answer) const;

  /// Judges a final output against the ground truth.
  virtual Verdicts check_success(std::string_view output) const = 0;
  /// Whether a verdict set counts as solved.
  virtual bool solved(const Verdicts& verdicts) const = 0;

  /// Extra verdicts computed from the whole transcript (e.g. "+ best state").
  virtual Verdicts transcript_verdicts(const Transcript& transcript) const;
};

/// parse_value guarded against exceptions and non-finite results.
double decode_value(const Task& task, std::string_view completion) noexcept;

}  // namespace tout
