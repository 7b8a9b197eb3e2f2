#pragma once

#include <cstdint>
#include <limits>

#include <nlohmann/json.hpp>

namespace tout {

/// Knobs shared by every search method. Defaults follow the reference setup
/// (m = 20 Monte Carlo samples); all of them can be overridden.
struct SearchConfig {
  int k = 5;                 ///< candidates per expansion
  int b = 5;                 ///< BFS breadth limit
  int steps = 0;             ///< global step budget T; 0 defers to the task
  int m = 20;                ///< Monte Carlo samples per evaluated state
  double t_min = 0.2;
  double t_max = 1.0;
  double v_th = 0.5;         ///< DFS value threshold (strict >)
  double u_th = 10.0;        ///< DFS uncertainty threshold (strict <)
  double epsilon = 1e-6;     ///< regularizer in v / (u + epsilon)
  bool luq_enabled = true;
  bool ugs_enabled = true;
  std::uint64_t seed = 0;

  int max_outputs = 3;               ///< DFS stops after this many recorded outputs
  double propose_temperature = 0.7;  ///< temperature of thought-generation calls
  double final_temperature = 0.0;    ///< temperature of the closing G(s, 1) call
  bool two_pass_value = false;       ///< draw v from a second, independent sample set
  int max_tokens = 512;
  int n_chains = 5;                  ///< CoT-SC chain count
  int eval_jobs = 1;                 ///< concurrent state evaluations per BFS step

  /// Throws ConfigError on out-of-range fields.
  void validate() const;

  /// Number of value samples per state after applying the LUQ switch.
  int effective_samples() const noexcept { return luq_enabled ? m : 1; }

  /// `steps` if set, else the task's own budget.
  int step_budget(int task_max_steps) const noexcept { return steps > 0 ? steps : task_max_steps; }
};

void to_json(nlohmann::json& j, const SearchConfig& c);
void from_json(const nlohmann::json& j, SearchConfig& c);

}  // namespace tout
