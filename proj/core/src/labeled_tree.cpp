#include "tout/labeled_tree.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "tout/error.hpp"

namespace tout::tree {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<std::string> answer_of(std::string_view completion) {
  const auto pos = completion.find("answer:");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = completion.substr(pos + 7);
  rest = rest.substr(0, rest.find('\n'));
  return trim(rest);
}

}  // namespace

LabeledTreeTask::LabeledTreeTask(std::string id, int depth, std::set<std::string> goals, double min_value)
    : id_(std::move(id)), depth_(depth), goals_(std::move(goals)), min_value_(min_value) {
  if (depth_ < 1) throw InvalidArgument("labeled tree depth must be positive");
}

std::string LabeledTreeTask::key_of(const State& state) {
  std::string key;
  for (std::size_t i = 0; i < state.thoughts.size(); ++i) {
    if (i) key += '/';
    key += state.thoughts[i];
  }
  return key;
}

std::string LabeledTreeTask::propose_prompt(const State& state, int k) const {
  return SyntheticOracleBackend::propose_prompt(key_of(state), k);
}

std::vector<std::string> LabeledTreeTask::parse_proposals(const State&, std::string_view completion, int k) const {
  std::vector<std::string> labels;
  std::istringstream in{std::string(completion)};
  std::string line;
  while (std::getline(in, line) && static_cast<int>(labels.size()) < k) {
    std::string label = trim(line);
    if (label.empty() || label.find('/') != std::string::npos) continue;
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) continue;
    labels.push_back(std::move(label));
  }
  return labels;
}

std::string LabeledTreeTask::value_prompt(const State& state) const {
  return SyntheticOracleBackend::evaluate_prompt(key_of(state));
}

double LabeledTreeTask::parse_value(std::string_view completion) const {
  return SyntheticOracleBackend::decode_value(completion).value_or(min_value_);
}

bool LabeledTreeTask::is_terminal(const State& state) const {
  return static_cast<int>(state.depth()) >= depth_;
}

std::string LabeledTreeTask::final_prompt(const State& state) const {
  return SyntheticOracleBackend::final_prompt(key_of(state));
}

std::string LabeledTreeTask::final_output(const State&, std::string_view completion) const {
  return answer_of(completion).value_or(trim(completion));
}

std::string LabeledTreeTask::io_prompt() const { return "io\nstate: "; }

std::string LabeledTreeTask::cot_prompt() const { return "cot\nstate: "; }

std::optional<std::string> LabeledTreeTask::extract_answer(std::string_view completion) const {
  return answer_of(completion);
}

Verdicts LabeledTreeTask::check_success(std::string_view output) const {
  return {{"success", goals_.contains(trim(output)) ? 1.0 : 0.0}};
}

bool LabeledTreeTask::solved(const Verdicts& verdicts) const {
  auto it = verdicts.find("success");
  return it != verdicts.end() && it->second == 1.0;
}

LabeledTreeTask SyntheticTree::task() const { return LabeledTreeTask(id, depth, {goal}); }

std::unique_ptr<SyntheticOracleBackend> SyntheticTree::backend(std::uint64_t seed) const {
  return std::make_unique<SyntheticOracleBackend>(true_value, noise_std, seed, proposals);
}

SyntheticTree make_synthetic_tree(std::uint64_t family_seed, int index, const SyntheticTreeSpec& spec) {
  if (spec.depth < 1 || spec.k < 2) throw InvalidArgument("synthetic tree needs depth >= 1 and k >= 2");
  if (!(spec.trap_win_probability > 0.0 && spec.trap_win_probability < 1.0)) {
    throw InvalidArgument("trap_win_probability must lie in (0, 1)");
  }

  std::seed_seq seq{static_cast<std::uint32_t>(family_seed), static_cast<std::uint32_t>(family_seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const double p_lo = std::max(0.01, spec.trap_win_probability - 0.05);
  const double p_hi = std::min(0.99, spec.trap_win_probability + 0.05);
  std::uniform_real_distribution<double> win_probability(p_lo, p_hi);
  const boost::math::normal standard_normal;

  SyntheticTree tree;
  tree.id = std::to_string(index);
  tree.depth = spec.depth;

  std::vector<std::string> labels{"c", "t"};
  for (int i = 1; i <= spec.k - 2; ++i) labels.push_back("d" + std::to_string(i));

  std::vector<std::string> level{""};
  for (int depth = 0; depth < spec.depth; ++depth) {
    std::vector<std::string> next;
    for (const auto& key : level) {
      std::vector<std::string> order = labels;
      std::shuffle(order.begin(), order.end(), rng);
      std::string listing;
      for (const auto& label : order) {
        const std::string child = key.empty() ? label : key + "/" + label;
        if (label == "c") {
          tree.true_value[child] = spec.correct_value;
          tree.noise_std[child] = spec.correct_noise;
        } else if (label == "t") {
          // P(value + trap_noise * g > correct_value) = p
          const double p = win_probability(rng);
          tree.true_value[child] =
              spec.correct_value - spec.trap_noise * boost::math::quantile(standard_normal, 1.0 - p);
          tree.noise_std[child] = spec.trap_noise;
        } else {
          tree.true_value[child] = spec.distractor_value;
          tree.noise_std[child] = spec.distractor_noise;
        }
        listing += label + "\n";
        next.push_back(child);
      }
      tree.proposals[key] = listing;
    }
    level = std::move(next);
  }

  tree.goal = "c";
  for (int i = 1; i < spec.depth; ++i) tree.goal += "/c";
  return tree;
}

}  // namespace tout::tree
