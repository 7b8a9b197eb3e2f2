#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tout/expression.hpp"
#include "tout/rational.hpp"
#include "tout/task.hpp"

namespace tout::game24 {

struct Puzzle {
  std::array<std::int64_t, 4> numbers{};
  int index = 0;  ///< rank in the dataset

  /// "4 9 10 13"
  std::string to_string() const;
};

struct SolutionCheck {
  bool ok = false;
  std::string reason;  ///< empty when ok
  explicit operator bool() const noexcept { return ok; }
};

/// True iff `candidate` parses, uses exactly the puzzle's numbers (as a
/// multiset) and evaluates to exactly 24. A leading "Answer:" and a trailing
/// "=24" are accepted. Never throws.
SolutionCheck check_solution(std::string_view candidate, const Puzzle& puzzle);

/// Exhaustive search over operand orders, operators and tree shapes; returns a
/// witness evaluating to 24 or nullopt.
std::optional<Expression> brute_force_solvable(const Puzzle& puzzle);

/// CSV with a header naming `rank` and `puzzle` (or `puzzles`) columns; the
/// puzzle field holds four space-separated integers.
std::vector<Puzzle> load_puzzles_csv(const std::filesystem::path& path);
std::vector<Puzzle> parse_puzzles_csv(std::string_view text);

/// One parsed "a op b = c (left: ...)" step.
struct Step {
  Rational lhs;
  BinaryOp op = BinaryOp::add;
  Rational rhs;
  Rational result;
  std::vector<Rational> left;  ///< remaining numbers after the step, sorted
  std::string to_string() const;
};

/// Parses and validates a step against the numbers currently available.
/// nullopt if the shape is wrong, an operand is not available, the arithmetic
/// is off or the "left" list disagrees.
std::optional<Step> parse_step(std::string_view line, const std::vector<Rational>& available);

/// Numbers still in play for a state: the puzzle numbers at the root, else the
/// "left" list of the latest thought.
std::vector<Rational> remaining_numbers(const State& state);

/// Value table for sure / likely / impossible judgements.
struct ValueMap {
  double sure = 20.0;
  double likely = 1.0;
  double impossible = 0.001;
};

class Game24Task final : public Task {
 public:
  explicit Game24Task(Puzzle puzzle, ValueMap values = {});

  const Puzzle& puzzle() const noexcept { return puzzle_; }

  std::string name() const override { return "game24"; }
  std::string problem_id() const override;
  std::string input() const override { return puzzle_.to_string(); }
  int max_steps() const override { return 3; }

  std::string propose_prompt(const State& state, int k) const override;
  std::vector<std::string> parse_proposals(const State& state, std::string_view completion,
                                           int k) const override;
  std::string value_prompt(const State& state) const override;
  double parse_value(std::string_view completion) const override;
  double min_value() const override { return values_.impossible; }
  bool is_terminal(const State& state) const override;

  std::string final_prompt(const State& state) const override;
  std::string final_output(const State& state, std::string_view completion) const override;

  std::string io_prompt() const override;
  std::string cot_prompt() const override;
  std::optional<std::string> extract_answer(std::string_view completion) const override;
  std::string canonicalize_answer(std::string_view answer) const override;

  Verdicts check_success(std::string_view output) const override;
  bool solved(const Verdicts& verdicts) const override;

 private:
  Puzzle puzzle_;
  ValueMap values_;
};

}  // namespace tout::game24
