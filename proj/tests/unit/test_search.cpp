#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tout/error.hpp"
#include "tout/labeled_tree.hpp"
#include "tout/search.hpp"
#include "tree_script.hpp"

using namespace tout;
using testing::TreeScript;
using testing::trace_of;

namespace {

struct Scenario {
  TreeScript script;
  std::unique_ptr<tree::LabeledTreeTask> task;

  explicit Scenario(const std::string& spec, std::set<std::string> goals = {}) {
    const int depth = testing::load_tree(script, spec);
    task = std::make_unique<tree::LabeledTreeTask>("t", depth, std::move(goals));
  }
};

SearchConfig two_samples() {
  SearchConfig c;
  c.m = 2;
  return c;
}

using Keys = std::vector<std::string>;

}  // namespace

TEST_CASE("bfs keeps the most confident candidates") {
  Scenario s("A:10:1 B:9:0.5 C:20:10");
  auto c = two_samples();
  c.b = 2;
  Transcript t;
  const auto r = tout_bfs(*s.task, s.script, c, t);
  const auto trace = trace_of(t);
  REQUIRE(trace.selections.size() == 1);
  CHECK(trace.selections[0] == Keys{"B", "A"});
  CHECK(trace.prunes == Keys{"C"});
  CHECK(r.best_state.score == doctest::Approx(9.0 / (0.5 + 1e-6)));
  CHECK(r.final_output == "B");

  SUBCASE("selection flips without uncertainty-aware ranking") {
    c.ugs_enabled = false;
    Transcript t2;
    tout_bfs(*s.task, s.script, c, t2);
    CHECK(trace_of(t2).selections[0] == Keys{"C", "A"});
  }
  SUBCASE("baseline ranks by a single sampled value") {
    Transcript t3;
    tot_baseline(*s.task, s.script, c, t3);
    CHECK(trace_of(t3).selections[0] == Keys{"C", "A"});
  }
}

TEST_CASE("bfs with one candidate per step is a greedy chain") {
  Scenario s("a:1:0{b:1:0{c:1:0}}");
  auto c = two_samples();
  c.b = 1;
  Transcript t;
  const auto r = tout_bfs(*s.task, s.script, c, t);
  CHECK(trace_of(t).selections == std::vector<Keys>{{"a"}, {"a/b"}, {"a/b/c"}});
  CHECK(r.final_output == "a/b/c");
}

TEST_CASE("breadth five keeps all viable branches, breadth one only the best") {
  Scenario s("p:5:0 q:4:0 r:3:0 s:2:0 t:1:0");
  auto c = two_samples();
  c.luq_enabled = false;
  c.ugs_enabled = false;
  c.b = 5;
  Transcript t5;
  tot_baseline(*s.task, s.script, c, t5);
  CHECK(trace_of(t5).selections[0].size() == 5);
  c.b = 1;
  Transcript t1;
  tot_baseline(*s.task, s.script, c, t1);
  CHECK(trace_of(t1).selections[0] == Keys{"p"});
}

TEST_CASE("bfs final call is greedy") {
  Scenario s("a:5:0 b:1:0");
  Transcript t;
  tout_bfs(*s.task, s.script, two_samples(), t);
  const auto gens = t.of_type("generate");
  CHECK((*gens.back())["temperature"] == 0.0);
  CHECK((*gens.front())["temperature"] == doctest::Approx(0.7));
}

TEST_CASE("terminal states carry over when the budget exceeds the task depth") {
  Scenario s("a:5:0{b:5:0} c:1:0{d:1:0}");
  auto c = two_samples();
  c.b = 2;
  c.steps = 3;
  Transcript t;
  const auto r = tout_bfs(*s.task, s.script, c, t);
  CHECK(trace_of(t).selections == std::vector<Keys>{{"a", "c"}, {"a/b", "c/d"}, {"a/b", "c/d"}});
  CHECK(s.script.requests("propose") == 3);
  CHECK(r.final_output == "a/b");
}

TEST_CASE("bfs exhaustion") {
  Scenario s("a:1:0");
  s.task = std::make_unique<tree::LabeledTreeTask>("t", 2, std::set<std::string>{});
  Transcript t;
  CHECK_THROWS_AS(tout_bfs(*s.task, s.script, two_samples(), t), SearchExhausted);
}

TEST_CASE("bfs budget is exact") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const int b = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 5);
    const int depth = 3;
    Scenario s(testing::random_tree_spec(rng, depth, k));
    SearchConfig c;
    c.k = k;
    c.b = b;
    c.m = m;
    testing::CountingBackend counted(s.script);
    Transcript t;
    tout_bfs(*s.task, counted, c, t);
    // Full trees: every frontier state yields k children.
    int expected_evaluations = 0;
    int expected_expansions = 0;
    int frontier = 1;
    for (int step = 0; step < depth; ++step) {
      expected_expansions += frontier;
      expected_evaluations += frontier * k;
      frontier = std::min(b, frontier * k);
    }
    CHECK(s.script.completions("evaluate") == expected_evaluations * m);
    CHECK(s.script.requests("propose") == expected_expansions);
    CHECK(s.script.requests("final") == 1);
    CHECK(expected_evaluations * m <= depth * b * k * m);
    CHECK(counted.completions() == expected_evaluations * m + expected_expansions + 1);
  }
}

TEST_CASE("dfs visits the only passing child down to a leaf") {
  Scenario s("a:0.4:0 b:3:0.5{ba:2:0.2{baa:1:0}} c:5:2", {"b/ba/baa"});
  auto c = two_samples();
  c.v_th = 0.5;
  c.u_th = 1.0;
  Transcript t;
  const auto r = tout_dfs(*s.task, s.script, c, t);
  const auto trace = trace_of(t);
  CHECK(trace.visits == Keys{"", "b", "b/ba", "b/ba/baa"});
  CHECK(trace.prunes == Keys{"a", "c"});
  CHECK(trace.outputs == Keys{"b/ba/baa"});
  CHECK(r.final_output == "b/ba/baa");
  CHECK(s.task->check_success(r.final_output).at("success") == 1.0);
}

TEST_CASE("dfs thresholds are strict") {
  Scenario s("a:0.5:0 b:3:1");
  auto c = two_samples();
  c.v_th = 0.5;
  c.u_th = 1.0;
  Transcript t;
  CHECK_THROWS_AS(tout_dfs(*s.task, s.script, c, t), SearchExhausted);
  CHECK(trace_of(t).prunes.size() == 2);
}

TEST_CASE("dfs with an infinite value threshold prunes everything") {
  Scenario s("a:5:0 b:3:0");
  auto c = two_samples();
  c.v_th = std::numeric_limits<double>::infinity();
  Transcript t;
  try {
    tout_dfs(*s.task, s.script, c, t);
    FAIL("expected SearchExhausted");
  } catch (const SearchExhausted& e) {
    REQUIRE(e.best_partial());
    CHECK(e.best_partial()->state->depth() == 1);
  }
}

TEST_CASE("dfs without uncertainty gating matches the value-threshold baseline") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    // Zero spread, so one sample and the mean of many agree.
    Scenario s(testing::random_tree_spec(rng, 3, 3, 0.0));
    auto c = two_samples();
    c.v_th = 8.0;
    c.u_th = std::numeric_limits<double>::infinity();
    c.ugs_enabled = false;
    c.max_outputs = 100;
    auto run = [&](bool baseline, Transcript& t) {
      try {
        return baseline ? tot_baseline(*s.task, s.script, c, t, TreeSearch::dfs).final_output
                        : tout_dfs(*s.task, s.script, c, t).final_output;
      } catch (const SearchExhausted&) {
        return std::string("exhausted");
      }
    };
    Transcript a;
    Transcript b;
    const auto out_a = run(false, a);
    const auto out_b = run(true, b);
    CHECK(trace_of(a).visits == trace_of(b).visits);
    CHECK(trace_of(a).prunes == trace_of(b).prunes);
    CHECK(out_a == out_b);
  }
}

TEST_CASE("dfs stops after max_outputs") {
  Scenario s("a:5:0{x:5:0 y:4:0} b:4:0{z:5:0}");
  auto c = two_samples();
  c.max_outputs = 2;
  Transcript t;
  const auto r = tout_dfs(*s.task, s.script, c, t);
  CHECK(trace_of(t).outputs == Keys{"a/x", "a/y"});
  CHECK(r.recorded_outputs.size() == 2);
  CHECK(r.final_output == "a/x");
}

TEST_CASE("dfs soundness: every recorded path passed both thresholds") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Scenario s(testing::random_tree_spec(rng, 3, 3));
    auto c = two_samples();
    c.v_th = 6.0;
    c.u_th = 6.0;
    c.max_outputs = 5;
    Transcript t;
    SearchResult r;
    try {
      r = tout_dfs(*s.task, s.script, c, t);
    } catch (const SearchExhausted&) {
      continue;
    }
    std::map<std::uint64_t, const nlohmann::json*> evaluated;
    for (const auto* e : t.of_type("evaluate")) evaluated[(*e)["state_id"].get<std::uint64_t>()] = e;
    for (const auto& out : r.recorded_outputs) {
      const State* state = out.state.state.get();
      auto id = state->id;
      while (evaluated.contains(id)) {
        const auto& e = *evaluated.at(id);
        CHECK(e["value"].get<double>() > c.v_th);
        CHECK(number_from_json(e["uncertainty"]) < c.u_th);
        id = e["parent_id"].get<std::uint64_t>();
      }
    }
  }
}

TEST_CASE("ablation coherence with the baseline") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    Scenario s(testing::random_tree_spec(rng, 2, 3));
    auto c = two_samples();
    c.b = 2;
    c.luq_enabled = false;
    c.ugs_enabled = false;
    Transcript a;
    Transcript b;
    tout_bfs(*s.task, s.script, c, a);
    auto base = c;
    base.luq_enabled = true;
    base.ugs_enabled = true;
    tot_baseline(*s.task, s.script, base, b);
    CHECK(testing::timeless(a) == testing::timeless(b));
  }
}

TEST_CASE("concurrent evaluation logs the same transcript") {
  std::mt19937_64 rng(31);
  Scenario s(testing::random_tree_spec(rng, 2, 4));
  auto c = two_samples();
  c.b = 3;
  Transcript serial;
  tout_bfs(*s.task, s.script, c, serial);
  c.eval_jobs = 4;
  Transcript parallel;
  tout_bfs(*s.task, s.script, c, parallel);
  CHECK(testing::timeless(serial) == testing::timeless(parallel));
}

TEST_CASE("io and chain-of-thought baselines") {
  tree::LabeledTreeTask task("t", 1, {"a"});
  ScriptedBackend s("");
  SearchConfig c;
  s.add(task.io_prompt(), c.t_max, 0, "42");
  Transcript t;
  CHECK(io_prompt(task, s, c, t) == "42");

  ScriptedBackend empty("");
  Transcript t2;
  CHECK(io_prompt(task, empty, c, t2).empty());
  CHECK(task.check_success("").at("success") == 0.0);

  ScriptedBackend cot("");
  cot.add(task.cot_prompt(), c.t_max, 0, "thinking\nanswer: a");
  Transcript t3;
  CHECK(cot_prompt(task, cot, c, t3) == "a");

  ScriptedBackend lost("no answer here");
  Transcript t4;
  CHECK(cot_prompt(task, lost, c, t4).empty());
}

TEST_CASE("self-consistency picks the modal answer, earliest on ties") {
  tree::LabeledTreeTask task("t", 1, {"A"});
  SearchConfig c;
  auto run = [&](const std::vector<std::string>& answers) {
    ScriptedBackend s("");
    for (std::size_t i = 0; i < answers.size(); ++i) s.add(task.cot_prompt(), c.t_max, static_cast<int>(i), answers[i]);
    Transcript t;
    return cot_sc(task, s, c, static_cast<int>(answers.size()), t);
  };
  CHECK(run({"answer: A", "answer: B", "answer: A"}) == "A");
  CHECK(run({"answer: A", "answer: B"}) == "A");
  CHECK(run({"answer: B", "answer: A", "answer: A"}) == "A");
  CHECK(run({"junk", "junk"}).empty());

  ScriptedBackend single("");
  single.add(task.cot_prompt(), c.t_max, 0, "answer: Q");
  Transcript a;
  Transcript b;
  CHECK(cot_sc(task, single, c, 1, a) == cot_prompt(task, single, c, b));
}

TEST_CASE("select_frontier") {
  StateStore store;
  auto root = store.make_root("x");
  std::vector<ScoredState> cands;
  for (double score : {1.0, 5.0, 3.0}) {
    ScoredState s;
    s.state = store.extend(*root, "t");
    s.score = score;
    cands.push_back(s);
  }
  const auto top = select_frontier(cands, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].score == 5.0);
  CHECK(top[1].score == 3.0);
  CHECK(select_frontier(cands, 10).size() == 3);
  CHECK_THROWS_AS(select_frontier(cands, 0), InvalidArgument);
}
