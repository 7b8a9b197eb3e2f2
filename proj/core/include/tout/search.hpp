#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tout/backend.hpp"
#include "tout/config.hpp"
#include "tout/error.hpp"
#include "tout/task.hpp"
#include "tout/transcript.hpp"
#include "tout/uncertainty.hpp"

namespace tout {

struct RecordedOutput {
  std::string output;
  double score = 0.0;
  ScoredState state;
};

struct SearchResult {
  std::string final_output;
  ScoredState best_state;
  std::size_t visited = 0;  ///< states evaluated
  std::vector<RecordedOutput> recorded_outputs;
};

/// No state could be expanded further (BFS) or passed the thresholds (DFS).
class SearchExhausted : public Error {
 public:
  SearchExhausted(const std::string& what, std::optional<ScoredState> best_partial);
  const std::optional<ScoredState>& best_partial() const noexcept { return best_partial_; }

 private:
  std::optional<ScoredState> best_partial_;
};

/// The `b` candidates that rank first under ranks_before, in rank order.
/// Because the subset objective is a sum of independent per-state scores, this
/// is the size-b subset with the largest total score.
std::vector<ScoredState> select_frontier(std::vector<ScoredState> candidates, int b);

/// Breadth-first search keeping the b most confident states per step; after T
/// steps the best state is completed with a single greedy generation.
SearchResult tout_bfs(const Task& task, Backend& backend, const SearchConfig& config,
                      Transcript& transcript);

/// Depth-first search descending into children, best score first, that beat
/// both thresholds (value > v_th and, under UGS, uncertainty < u_th). States at
/// depth T are completed and recorded; the search stops after max_outputs
/// records or when the tree is exhausted.
SearchResult tout_dfs(const Task& task, Backend& backend, const SearchConfig& config,
                      Transcript& transcript);

enum class TreeSearch { bfs, dfs };

/// Plain tree-of-thoughts: the requested search with LUQ and UGS switched off.
SearchResult tot_baseline(const Task& task, Backend& backend, SearchConfig config,
                          Transcript& transcript, TreeSearch kind = TreeSearch::bfs);

/// Single completion of the task's input-output prompt at t_max, verbatim.
std::string io_prompt(const Task& task, Backend& backend, const SearchConfig& config,
                      Transcript& transcript);

/// Single chain-of-thought completion at t_max; returns the extracted answer or
/// "" when none can be found.
std::string cot_prompt(const Task& task, Backend& backend, const SearchConfig& config,
                       Transcript& transcript);

/// n_chains chain-of-thought samples; the most frequent canonical answer wins,
/// ties going to the earliest sample. "" when no chain yields an answer.
std::string cot_sc(const Task& task, Backend& backend, const SearchConfig& config, int n_chains,
                   Transcript& transcript);

}  // namespace tout
