#include "tout/search.hpp"

#include <algorithm>
#include <future>
#include <map>

namespace tout {

SearchExhausted::SearchExhausted(const std::string& what, std::optional<ScoredState> best_partial)
    : Error(what), best_partial_(std::move(best_partial)) {}

std::vector<ScoredState> select_frontier(std::vector<ScoredState> candidates, int b) {
  if (b < 1) throw InvalidArgument("select_frontier: b must be positive");
  std::sort(candidates.begin(), candidates.end(), ranks_before);
  if (candidates.size() > static_cast<std::size_t>(b)) candidates.resize(static_cast<std::size_t>(b));
  return candidates;
}

namespace {

nlohmann::json score_fields(const ScoredState& s) {
  return {{"state_id", s.state->id},
          {"value", s.value},
          {"uncertainty", s.uncertainty},
          {"score", number_to_json(s.score)}};
}

ScoredState unevaluated(StatePtr state) {
  ScoredState scored;
  scored.state = std::move(state);
  return scored;
}

/// G(p, s, k): one proposal call, parsed into at most k children.
std::vector<StatePtr> expand(const State& state, const Task& task, Backend& backend, const SearchConfig& config,
                             StateStore& store, Transcript& transcript) {
  BackendRequest request;
  request.prompt = task.propose_prompt(state, config.k);
  request.temperature = config.propose_temperature;
  request.max_tokens = config.max_tokens;
  BackendResponse response = generate_logged(backend, request, 0, transcript);

  std::vector<std::string> thoughts =
      task.parse_proposals(state, response.completions.empty() ? std::string{} : response.completions.front(),
                           config.k);
  if (thoughts.size() > static_cast<std::size_t>(config.k)) thoughts.resize(static_cast<std::size_t>(config.k));

  std::vector<StatePtr> children;
  nlohmann::json listed = nlohmann::json::array();
  for (auto& thought : thoughts) {
    if (thought.empty()) continue;
    auto child = store.extend(state, std::move(thought));
    listed.push_back({{"state_id", child->id}, {"thought", child->thoughts.back()}});
    children.push_back(std::move(child));
  }
  transcript.add("expand", {{"state_id", state.id}, {"depth", state.depth()}, {"children", std::move(listed)}});
  return children;
}

std::vector<ScoredState> evaluate_all(const std::vector<StatePtr>& states, const Task& task, Backend& backend,
                                      const SearchConfig& config, Transcript& transcript) {
  std::vector<ScoredState> scored;
  scored.reserve(states.size());
  if (config.eval_jobs <= 1 || states.size() <= 1) {
    for (const auto& state : states) scored.push_back(evaluate_state(state, config, task, backend, transcript));
    return scored;
  }
  // Workers log privately; transcripts are merged in candidate order so the
  // result does not depend on scheduling.
  const std::size_t jobs = static_cast<std::size_t>(config.eval_jobs);
  for (std::size_t begin = 0; begin < states.size(); begin += jobs) {
    const std::size_t end = std::min(states.size(), begin + jobs);
    std::vector<Transcript> logs(end - begin);
    std::vector<std::future<ScoredState>> futures;
    for (std::size_t i = begin; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        return evaluate_state(states[i], config, task, backend, logs[i - begin]);
      }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      scored.push_back(futures[i - begin].get());
      transcript.append(std::move(logs[i - begin]));
    }
  }
  return scored;
}

/// G(p, s, 1) at the final temperature.
std::string complete(const ScoredState& scored, const Task& task, Backend& backend, const SearchConfig& config,
                     Transcript& transcript) {
  BackendRequest request;
  request.prompt = task.final_prompt(*scored.state);
  request.temperature = config.final_temperature;
  request.max_tokens = config.max_tokens;
  BackendResponse response = generate_logged(backend, request, 0, transcript);
  return task.final_output(*scored.state, response.completions.empty() ? std::string{} : response.completions.front());
}

class DepthFirst {
 public:
  DepthFirst(const Task& task, Backend& backend, const SearchConfig& config, Transcript& transcript)
      : task_(task),
        backend_(backend),
        config_(config),
        transcript_(transcript),
        steps_(config.step_budget(task.max_steps())) {}

  SearchResult run() {
    visit(unevaluated(store_.make_root(task_.input())));
    if (result_.recorded_outputs.empty()) {
      throw SearchExhausted("depth-first search recorded no output: every branch was pruned", deepest_);
    }
    const auto best = std::min_element(result_.recorded_outputs.begin(), result_.recorded_outputs.end(),
                                       [](const RecordedOutput& a, const RecordedOutput& b) {
                                         return a.score > b.score;  // earliest wins ties
                                       });
    result_.final_output = best->output;
    result_.best_state = best->state;
    transcript_.add("final", {{"state_id", best->state.state->id}, {"output", best->output}});
    return result_;
  }

 private:
  bool passes(const ScoredState& child) const {
    if (!(child.value > config_.v_th)) return false;
    return !config_.ugs_enabled || child.uncertainty < config_.u_th;
  }

  void note_depth(const ScoredState& s) {
    if (!deepest_ || s.state->depth() > deepest_->state->depth()) deepest_ = s;
  }

  void visit(const ScoredState& node) {
    const State& state = *node.state;
    transcript_.add("visit", {{"state_id", state.id}, {"depth", state.depth()}});
    if (static_cast<int>(state.depth()) >= steps_ || (!state.is_root() && task_.is_terminal(state))) {
      RecordedOutput record{complete(node, task_, backend_, config_, transcript_), node.score, node};
      transcript_.add("record_output",
                      {{"state_id", state.id}, {"output", record.output}, {"score", number_to_json(record.score)}});
      result_.recorded_outputs.push_back(std::move(record));
      done_ = static_cast<int>(result_.recorded_outputs.size()) >= config_.max_outputs;
      return;
    }

    auto children = evaluate_all(expand(state, task_, backend_, config_, store_, transcript_), task_, backend_,
                                 config_, transcript_);
    result_.visited += children.size();
    std::sort(children.begin(), children.end(), ranks_before);

    std::vector<const ScoredState*> admitted;
    for (const auto& child : children) {
      note_depth(child);
      if (passes(child)) {
        admitted.push_back(&child);
      } else {
        auto fields = score_fields(child);
        fields["parent_id"] = state.id;
        transcript_.add("prune", std::move(fields));
      }
    }
    for (const ScoredState* child : admitted) {
      if (done_) return;
      visit(*child);
      if (!done_) transcript_.add("backtrack", {{"from", child->state->id}, {"to", state.id}});
    }
  }

  const Task& task_;
  Backend& backend_;
  const SearchConfig& config_;
  Transcript& transcript_;
  const int steps_;
  StateStore store_;
  SearchResult result_;
  std::optional<ScoredState> deepest_;
  bool done_ = false;
};

}  // namespace

SearchResult tout_bfs(const Task& task, Backend& backend, const SearchConfig& config, Transcript& transcript) {
  config.validate();
  const int steps = config.step_budget(task.max_steps());
  StateStore store;
  SearchResult result;

  std::vector<ScoredState> frontier{unevaluated(store.make_root(task.input()))};
  std::optional<ScoredState> best_seen;

  for (int t = 1; t <= steps; ++t) {
    std::vector<ScoredState> candidates;
    for (const auto& entry : frontier) {
      const State& state = *entry.state;
      if (!state.is_root() && task.is_terminal(state)) {
        candidates.push_back(entry);  // complete solutions carry over unchanged
        continue;
      }
      auto scored = evaluate_all(expand(state, task, backend, config, store, transcript), task, backend, config,
                                 transcript);
      result.visited += scored.size();
      for (auto& s : scored) {
        if (!best_seen || ranks_before(s, *best_seen)) best_seen = s;
        candidates.push_back(std::move(s));
      }
    }
    if (candidates.empty()) {
      throw SearchExhausted("breadth-first search exhausted at step " + std::to_string(t) + ": no proposals",
                            best_seen);
    }

    std::vector<ScoredState> selected = select_frontier(candidates, config.b);
    nlohmann::json kept = nlohmann::json::array();
    for (const auto& s : selected) kept.push_back(score_fields(s));
    transcript.add("select", {{"step", t}, {"kept", std::move(kept)}});
    for (const auto& c : candidates) {
      const bool is_kept = std::any_of(selected.begin(), selected.end(),
                                       [&](const ScoredState& s) { return s.state->id == c.state->id; });
      if (!is_kept) {
        auto fields = score_fields(c);
        fields["step"] = t;
        transcript.add("prune", std::move(fields));
      }
    }
    frontier = std::move(selected);
  }

  result.best_state = frontier.front();
  result.final_output = complete(result.best_state, task, backend, config, transcript);
  transcript.add("final", {{"state_id", result.best_state.state->id}, {"output", result.final_output}});
  return result;
}

SearchResult tout_dfs(const Task& task, Backend& backend, const SearchConfig& config, Transcript& transcript) {
  config.validate();
  return DepthFirst(task, backend, config, transcript).run();
}

SearchResult tot_baseline(const Task& task, Backend& backend, SearchConfig config, Transcript& transcript,
                          TreeSearch kind) {
  config.luq_enabled = false;
  config.ugs_enabled = false;
  return kind == TreeSearch::bfs ? tout_bfs(task, backend, config, transcript)
                                 : tout_dfs(task, backend, config, transcript);
}

namespace {

std::string single_completion(const std::string& prompt, Backend& backend, const SearchConfig& config,
                              Transcript& transcript) {
  BackendRequest request;
  request.prompt = prompt;
  request.temperature = config.t_max;
  request.max_tokens = config.max_tokens;
  BackendResponse response = generate_logged(backend, request, 0, transcript);
  return response.completions.empty() ? std::string{} : response.completions.front();
}

}  // namespace

std::string io_prompt(const Task& task, Backend& backend, const SearchConfig& config, Transcript& transcript) {
  std::string output = single_completion(task.io_prompt(), backend, config, transcript);
  transcript.add("final", {{"output", output}});
  return output;
}

std::string cot_prompt(const Task& task, Backend& backend, const SearchConfig& config, Transcript& transcript) {
  const std::string completion = single_completion(task.cot_prompt(), backend, config, transcript);
  const auto answer = task.extract_answer(completion);
  const std::string output = answer.value_or("");
  transcript.add("final", {{"output", output}, {"parsed", answer.has_value()}});
  return output;
}

std::string cot_sc(const Task& task, Backend& backend, const SearchConfig& config, int n_chains,
                   Transcript& transcript) {
  if (n_chains < 1) throw InvalidArgument("cot_sc: n_chains must be positive");
  BackendRequest request;
  request.prompt = task.cot_prompt();
  request.temperature = config.t_max;
  request.n = n_chains;
  request.max_tokens = config.max_tokens;
  const BackendResponse response = generate_logged(backend, request, 0, transcript);

  struct Group {
    int count = 0;
    std::size_t first = 0;
    std::string answer;
  };
  std::map<std::string, Group> groups;
  for (std::size_t i = 0; i < response.completions.size(); ++i) {
    const auto answer = task.extract_answer(response.completions[i]);
    if (!answer) continue;
    auto [it, inserted] = groups.try_emplace(task.canonicalize_answer(*answer));
    if (inserted) {
      it->second.first = i;
      it->second.answer = *answer;
    }
    ++it->second.count;
  }

  const Group* modal = nullptr;
  for (const auto& [key, group] : groups) {
    if (!modal || group.count > modal->count || (group.count == modal->count && group.first < modal->first)) {
      modal = &group;
    }
  }
  std::string output = modal ? modal->answer : std::string{};
  nlohmann::json votes = nlohmann::json::object();
  for (const auto& [key, group] : groups) votes[key] = group.count;
  transcript.add("final", {{"output", output}, {"votes", std::move(votes)}});
  return output;
}

}  // namespace tout
