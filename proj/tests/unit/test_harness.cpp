#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "tout/crosswords.hpp"
#include "tout/error.hpp"
#include "tout/game24.hpp"
#include "tout/harness.hpp"
#include "tout/search.hpp"
#include "tree_script.hpp"

using namespace tout;
namespace fs = std::filesystem;

namespace {

const char* kPuzzles =
    "rank,puzzle\n"
    "901,1 1 4 6\n902,4 5 6 10\n903,2 3 5 12\n904,1 2 4 6\n905,3 3 8 8\n"
    "906,1 5 5 5\n907,4 4 10 10\n908,2 2 6 7\n909,1 3 4 6\n910,5 5 5 9\n";

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name) {
    root = fs::temp_directory_path() / ("tout-harness-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(root / name) << text;
    return root / name;
  }
};

/// io answers for the first `solved` puzzles are correct, the rest wrong.
std::shared_ptr<ScriptedBackend> game24_io_script(int solved, const SearchConfig& search) {
  auto script = std::make_shared<ScriptedBackend>("no idea");
  int i = 0;
  for (const auto& p : game24::parse_puzzles_csv(kPuzzles)) {
    game24::Game24Task task(p);
    const auto witness = game24::brute_force_solvable(p);
    REQUIRE(witness);
    script->add(task.io_prompt(), search.t_max, 0, i++ < solved ? witness->to_string() + " = 24" : "1 + 1 = 24");
  }
  return script;
}

RunConfig game24_config(const Workspace& ws) {
  RunConfig c;
  c.task = "game24";
  c.method = Method::io;
  c.dataset = ws.write("puzzles.csv", kPuzzles);
  c.output_dir = ws.root / "out";
  c.run_id = "run";
  return c;
}

BackendFactory fixed(std::shared_ptr<Backend> backend) {
  return [backend](const RunConfig&, const Task&, std::uint64_t) { return backend; };
}

double metric(const std::vector<ResultRow>& rows, const std::string& name) {
  for (const auto& r : rows) {
    if (r.metric == name) return r.value;
  }
  FAIL("metric missing: " << name);
  return 0.0;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("method names") {
  for (auto m : {Method::io, Method::cot, Method::cot_sc, Method::tot_bfs, Method::tot_dfs, Method::tout_bfs,
                 Method::tout_dfs}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("mcts"), ConfigError);
}

TEST_CASE("run config validation") {
  Workspace ws("validate");
  auto ok = game24_config(ws);
  CHECK_NOTHROW(ok.validate());

  auto bad = [&](auto mutate) {
    RunConfig c = ok;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  bad([](RunConfig& c) { c.task = "sudoku"; });
  bad([](RunConfig& c) { c.backend = "carrier-pigeon"; });
  bad([](RunConfig& c) { c.backend = "synthetic"; });
  bad([](RunConfig& c) { c.dataset.clear(); });
  bad([](RunConfig& c) { c.first = 910, c.last = 901; });
  bad([](RunConfig& c) { c.jobs = 0; });
  bad([](RunConfig& c) { c.search.m = 0; });
  bad([](RunConfig& c) { c.task = "synthetic", c.backend = "synthetic", c.method = Method::io; });
  bad([](RunConfig& c) { c.task = "synthetic", c.backend = "http", c.method = Method::tout_bfs; });
}

TEST_CASE("digest tracks result-relevant fields only") {
  Workspace ws("digest");
  auto a = game24_config(ws);
  auto b = a;
  b.jobs = 4;
  b.run_id = "other";
  b.first = 901;
  CHECK(a.digest() == b.digest());
  b.search.m = 5;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("success rate counts solved episodes") {
  Workspace ws("rate");
  auto c = game24_config(ws);
  c.first = 901;
  c.last = 910;
  const auto rows = run_benchmark(c, fixed(game24_io_script(6, c.search)));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].metric == "success_rate");
  CHECK(rows[0].value == 60.0);
  CHECK(rows[0].episodes == 10);
  CHECK(fs::exists(c.output_dir / "results" / "run.csv"));
  CHECK(fs::exists(c.output_dir / "results" / "run.md"));

  const auto records = read_transcript(transcript_path(c));
  REQUIRE(records.size() == 10);
  int solved = 0;
  for (const auto& r : records) {
    CHECK(r.config_digest() == c.digest());
    solved += r.verdicts.at("success") == 1.0;
  }
  CHECK(solved * 100.0 / 10 == rows[0].value);
}

TEST_CASE("default game24 range is 901 to 1000") {
  Workspace ws("range");
  auto c = game24_config(ws);
  const auto rows = run_benchmark(c, fixed(game24_io_script(10, c.search)));
  CHECK(rows.at(0).episodes == 10);
  CHECK(rows.at(0).value == 100.0);
}

TEST_CASE("empty index range fails before any episode") {
  Workspace ws("empty");
  auto c = game24_config(ws);
  c.first = 2000;
  c.last = 2010;
  CHECK_THROWS_AS(run_benchmark(c, fixed(game24_io_script(0, c.search))), ConfigError);
  CHECK_FALSE(fs::exists(transcript_path(c)));
}

TEST_CASE("perfect crossword boards score 100 everywhere") {
  Workspace ws("xw");
  RunConfig c;
  c.task = "crosswords";
  c.method = Method::io;
  c.output_dir = ws.root / "out";
  c.dataset = ws.write("xw.json", R"([
    {"clues":["a","b","c","d","e","f","g","h","i","j"],"answers":["HEART","EMBER","ABUSE","RESIN","TREND","HEART","EMBER","ABUSE","RESIN","TREND"]},
    {"clues":["k","l","m","n","o","p","q","r","s","t"],"answers":["SATOR","AREPO","TENET","OPERA","ROTAS","SATOR","AREPO","TENET","OPERA","ROTAS"]}])");
  auto script = std::make_shared<ScriptedBackend>("");
  for (const auto& p : crosswords::load_puzzle_file(c.dataset)) {
    crosswords::CrosswordTask task(p);
    script->add(task.io_prompt(), c.search.t_max, 0, "Output:\n" + p.solution.to_string());
  }
  const auto rows = run_benchmark(c, fixed(script));
  CHECK(metric(rows, "letter") == 100.0);
  CHECK(metric(rows, "word") == 100.0);
  CHECK(metric(rows, "game") == 100.0);
}

TEST_CASE("resuming skips finished episodes and keeps aggregates") {
  Workspace ws("resume");
  auto c = game24_config(ws);
  auto script = game24_io_script(6, c.search);

  auto partial = c;
  partial.first = 901;
  partial.last = 904;
  run_benchmark(partial, fixed(script));
  CHECK(line_count(transcript_path(c)) == 4);

  testing::CountingBackend counted(*script);
  auto counting = std::shared_ptr<Backend>(&counted, [](Backend*) {});
  const auto resumed = run_benchmark(c, fixed(counting));
  CHECK(counted.calls() == 6);
  CHECK(line_count(transcript_path(c)) == 10);

  Workspace fresh_ws("resume-fresh");
  auto fresh = game24_config(fresh_ws);
  const auto direct = run_benchmark(fresh, fixed(game24_io_script(6, c.search)));
  CHECK(resumed.at(0).value == direct.at(0).value);
  CHECK(resumed.at(0).episodes == direct.at(0).episodes);

  const auto again = run_benchmark(c, fixed(counting));
  CHECK(counted.calls() == 6);
  CHECK(again.at(0).value == direct.at(0).value);
}

TEST_CASE("runs are deterministic and independent of job count") {
  Workspace ws("det");
  RunConfig c;
  c.task = "synthetic";
  c.backend = "synthetic";
  c.method = Method::tout_bfs;
  c.synthetic_trees = 12;
  c.search.b = 2;
  c.search.m = 4;
  c.output_dir = ws.root / "a";
  const auto first = run_benchmark(c);
  auto second_config = c;
  second_config.output_dir = ws.root / "b";
  second_config.jobs = 3;
  const auto second = run_benchmark(second_config);
  CHECK(first.at(0).value == second.at(0).value);

  auto a = read_transcript(transcript_path(c));
  auto b = read_transcript(transcript_path(second_config));
  REQUIRE(a.size() == b.size());
  auto by_id = [](std::vector<RunRecord>& v) {
    std::map<std::string, nlohmann::json> m;
    for (const auto& r : v) m[r.problem_id] = r.to_json(false);
    return m;
  };
  CHECK(by_id(a) == by_id(b));
}

TEST_CASE("ablation runs four distinct configurations in table order") {
  Workspace ws("ablate");
  RunConfig c;
  c.task = "synthetic";
  c.backend = "synthetic";
  c.method = Method::tout_bfs;
  c.synthetic_trees = 10;
  c.search.b = 1;
  c.search.m = 4;
  c.output_dir = ws.root;
  c.run_id = "abl";
  const auto rows = run_ablation(c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].method == "tout_bfs luq=off ugs=off");
  CHECK(rows[1].method == "tout_bfs luq=on ugs=off");
  CHECK(rows[2].method == "tout_bfs luq=off ugs=on");
  CHECK(rows[3].method == "tout_bfs");
  std::set<std::string> digests;
  for (const auto& r : rows) digests.insert(r.config_digest);
  CHECK(digests.size() == 4);

  auto baseline = c;
  baseline.method = Method::tot_bfs;
  baseline.run_id = "tot";
  run_benchmark(baseline);
  auto off_off = c;
  off_off.run_id = "abl-luq0-ugs0";
  const auto ablated = read_transcript(transcript_path(off_off));
  const auto direct = read_transcript(transcript_path(baseline));
  REQUIRE(ablated.size() == direct.size());
  for (std::size_t i = 0; i < ablated.size(); ++i) {
    CHECK(ablated[i].to_json(false)["events"] == direct[i].to_json(false)["events"]);
    CHECK(ablated[i].final_output == direct[i].final_output);
  }

  auto io = c;
  io.method = Method::io;
  CHECK_THROWS_AS(run_ablation(io), ConfigError);
}

TEST_CASE("m sweep") {
  Workspace ws("sweep");
  RunConfig c;
  c.task = "synthetic";
  c.backend = "synthetic";
  c.synthetic_trees = 5;
  c.output_dir = ws.root;
  c.run_id = "sw";
  CHECK_THROWS_AS(run_m_sweep(c, {}), ConfigError);

  const auto rows = run_m_sweep(c, {1, 3});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].m == 1);
  CHECK(rows[1].m == 3);
  auto m1 = c;
  m1.run_id = "sw-m1";
  for (const auto& r : read_transcript(transcript_path(m1))) {
    for (const auto* e : r.events.of_type("evaluate")) CHECK(number_from_json((*e)["uncertainty"]) == 0.0);
  }
}

namespace {

class DeadBackend : public Backend {
 public:
  std::string id() const override { return "dead"; }
  BackendResponse generate(const BackendRequest&, int) override { throw BackendUnavailable("down", 503); }
};

}  // namespace

TEST_CASE("backend failures mark episodes and abort past half") {
  Workspace ws("fail");
  auto c = game24_config(ws);
  c.first = 901;
  c.last = 904;
  auto good = game24_io_script(4, c.search);
  auto dead = std::make_shared<DeadBackend>();

  SUBCASE("one failure is tolerated") {
    auto factory = [&](const RunConfig&, const Task& task, std::uint64_t) -> std::shared_ptr<Backend> {
      if (task.problem_id() == "902") return dead;
      return good;
    };
    const auto rows = run_benchmark(c, factory);
    CHECK(rows.at(0).value == 75.0);
    for (const auto& r : read_transcript(transcript_path(c))) {
      CHECK(r.verdicts.contains("episode_failed") == (r.problem_id == "902"));
      if (r.problem_id == "902") CHECK(r.events.of_type("error").size() == 1);
    }
  }
  SUBCASE("a majority of failures aborts") {
    try {
      run_benchmark(c, fixed(dead));
      FAIL("expected RunAborted");
    } catch (const RunAborted& e) {
      CHECK(e.partial().at(0).episodes == 4);
      CHECK(e.partial().at(0).value == 0.0);
    }
  }
}

TEST_CASE("result emission") {
  ResultRow row{"tout_bfs", "d", 20, 5, "success_rate", 65.0, 100, 12.5};
  const auto csv = emit_results({row}, "csv");
  CHECK(csv == "method,m,b,metric,value,episodes,seconds\r\ntout_bfs,20,5,success_rate,65,100,12.500\r\n");
  CHECK(emit_results({row}, "csv") == csv);

  ResultRow odd = row;
  odd.method = "a,\"b\"";
  CHECK(emit_results({odd}, "csv").find("\"a,\"\"b\"\"\"") != std::string::npos);

  const auto md = emit_results({row, row, row, row}, "markdown");
  std::size_t lines = 0;
  for (char ch : md) lines += ch == '\n';
  CHECK(lines == 6);
  CHECK(md.rfind("| method | m | b | metric | value | episodes | seconds |", 0) == 0);

  try {
    emit_results({row}, "xml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("csv") != std::string::npos);
    CHECK(std::string(e.what()).find("markdown") != std::string::npos);
  }
}

TEST_CASE("episode seeds") {
  CHECK(episode_seed(0, 5) == 5);
  CHECK(episode_seed(0xff, 0x0f) == 0xf0);
}
