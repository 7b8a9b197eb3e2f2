#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tout/backend.hpp"
#include "tout/task.hpp"

namespace tout::tree {

/// Task over an explicit tree whose thoughts are child labels. A state's key
/// is its thoughts joined by '/', the root being "". Prompts use the
/// SyntheticOracleBackend line protocol, so the same task drives synthetic,
/// scripted and replayed episodes.
class LabeledTreeTask final : public Task {
 public:
  /// `goals` are the keys whose completion counts as success.
  LabeledTreeTask(std::string id, int depth, std::set<std::string> goals, double min_value = 0.0);

  static std::string key_of(const State& state);

  std::string name() const override { return "synthetic"; }
  std::string problem_id() const override { return id_; }
  std::string input() const override { return "tree " + id_; }
  int max_steps() const override { return depth_; }

  std::string propose_prompt(const State& state, int k) const override;
  std::vector<std::string> parse_proposals(const State& state, std::string_view completion,
                                           int k) const override;
  std::string value_prompt(const State& state) const override;
  double parse_value(std::string_view completion) const override;
  double min_value() const override { return min_value_; }
  bool is_terminal(const State& state) const override;

  std::string final_prompt(const State& state) const override;
  std::string final_output(const State& state, std::string_view completion) const override;

  std::string io_prompt() const override;
  std::string cot_prompt() const override;
  std::optional<std::string> extract_answer(std::string_view completion) const override;

  /// {"success": 0|1}
  Verdicts check_success(std::string_view output) const override;
  bool solved(const Verdicts& verdicts) const override;

 private:
  std::string id_;
  int depth_;
  std::set<std::string> goals_;
  double min_value_;
};

/// Parameters of the desk-scale benchmark: every step offers one correct
/// branch, one trap branch whose single noisy sample beats the correct value
/// with probability about trap_win_probability, and k - 2 weak distractors.
struct SyntheticTreeSpec {
  int depth = 3;
  int k = 5;
  double correct_value = 10.0;
  double correct_noise = 0.5;
  double trap_noise = 6.0;
  double trap_win_probability = 0.4;
  double distractor_value = 1.0;
  double distractor_noise = 1.0;
};

struct SyntheticTree {
  std::string id;
  int depth = 0;
  std::map<std::string, double> true_value;
  std::map<std::string, double> noise_std;
  std::map<std::string, std::string> proposals;  ///< state key -> newline-separated child labels
  std::string goal;                               ///< key of the all-correct leaf

  LabeledTreeTask task() const;
  /// Oracle backend whose noise stream is seeded by `seed`.
  std::unique_ptr<SyntheticOracleBackend> backend(std::uint64_t seed) const;
};

/// Tree `index` of the benchmark family identified by `family_seed`. Child
/// order is shuffled per node so ties cannot favour the correct branch.
SyntheticTree make_synthetic_tree(std::uint64_t family_seed, int index,
                                  const SyntheticTreeSpec& spec = {});

}  // namespace tout::tree
