#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tout/crosswords.hpp"
#include "tout/error.hpp"

using namespace tout;
using namespace tout::crosswords;

namespace {

const char* kHeart = R"([{
  "clues": ["h1", "h2", "h3", "h4", "h5", "v1", "v2", "v3", "v4", "v5"],
  "answers": ["HEART", "EMBER", "ABUSE", "RESIN", "TREND", "HEART", "EMBER", "ABUSE", "RESIN", "TREND"]
}])";

Puzzle heart() { return parse_puzzle_file(kHeart).at(0); }

Board place(Board board, const std::string& thought) {
  auto t = parse_thought(thought);
  REQUIRE(t);
  auto next = apply_thought(board, *t);
  REQUIRE(next);
  return *next;
}

std::string grid_json(const std::array<std::string, 5>& rows) {
  nlohmann::json answers = nlohmann::json::array();
  for (const auto& r : rows) answers.push_back(r);
  for (int c = 0; c < 5; ++c) {
    std::string col;
    for (const auto& r : rows) col += r[c];
    answers.push_back(col);
  }
  nlohmann::json clues = nlohmann::json::array();
  for (int i = 0; i < 10; ++i) clues.push_back("clue " + std::to_string(i));
  return nlohmann::json::array({{{"clues", clues}, {"answers", answers}}}).dump();
}

std::array<std::string, 5> random_rows(std::mt19937_64& rng) {
  std::array<std::string, 5> rows;
  for (auto& r : rows) {
    for (int i = 0; i < 5; ++i) r += static_cast<char>('A' + rng() % 26);
  }
  return rows;
}

}  // namespace

TEST_CASE("slots") {
  CHECK(Slot::parse("h1") == Slot{true, 1});
  CHECK(Slot::parse("V5") == Slot{false, 5});
  CHECK_FALSE(Slot::parse("h6"));
  CHECK_FALSE(Slot::parse("h0"));
  CHECK_FALSE(Slot::parse("d1"));
  CHECK(Slot{false, 5}.cell(2) == std::pair{2, 4});
  CHECK(Slot{true, 2}.cell(4) == std::pair{1, 4});
}

TEST_CASE("every cell is covered once across and once down") {
  std::array<int, 25> across{};
  std::array<int, 25> down{};
  for (const Slot& slot : all_slots()) {
    for (int i = 0; i < kSize; ++i) {
      auto [r, c] = slot.cell(i);
      (slot.horizontal ? across : down)[r * kSize + c]++;
    }
  }
  for (int i = 0; i < 25; ++i) {
    CHECK(across[i] == 1);
    CHECK(down[i] == 1);
  }
}

TEST_CASE("puzzle file loading") {
  const std::string one(kHeart);
  const std::string inner = one.substr(1, one.size() - 2);
  const auto puzzles = parse_puzzle_file("[" + inner + "," + inner + "]");
  CHECK(puzzles.size() == 2);
  CHECK(puzzles[0].solution.word_at(Slot{true, 3}) == "ABUSE");

  const std::string short_word =
      R"([{"clues":["a","b","c","d","e","f","g","h","i","j"],"answers":["HEAR","EMBER","ABUSE","RESIN","TREND","HEART","EMBER","ABUSE","RESIN","TREND"]}])";
  CHECK_THROWS_AS(parse_puzzle_file(short_word), LoadError);

  const std::string mismatch =
      R"([{"clues":["a","b","c","d","e","f","g","h","i","j"],"answers":["HEART","EMBER","ABUSE","RESIN","TREND","HEART","EMBER","ABUSE","XESIN","TREND"]}])";
  try {
    parse_puzzle_file(mismatch);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("puzzle 0") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_puzzle_file("{}"), LoadError);
  CHECK_THROWS_AS(parse_puzzle_file("not json"), LoadError);
}

TEST_CASE("placing words") {
  Board empty;
  const Board shown = place(empty, "h1. shown");
  CHECK(shown.word_at(Slot{true, 1}) == "SHOWN");

  const Board crossed = place(shown, "v5. naled");
  CHECK(crossed.word_at(Slot{false, 5}) == "NALED");
  CHECK(crossed.at(0, 4) == 'N');

  CHECK_FALSE(apply_thought(shown, *parse_thought("v1. train")));
  CHECK(WordThought{Slot{true, 1}, "SHOWN"}.to_string() == "h1. SHOWN");
  CHECK_FALSE(parse_thought("h6. hello"));
  CHECK_FALSE(parse_thought("h2. hi"));
}

TEST_CASE("board text round trip") {
  const Board b = place(Board{}, "h2. ember");
  CHECK(b.to_string() == ".....\nEMBER\n.....\n.....\n.....");
  CHECK(Board::parse(b.to_string()) == b);
  CHECK_FALSE(Board::parse("ABC"));
}

TEST_CASE("scoring") {
  const Puzzle p = heart();
  CHECK(score_board(p.solution, p) == BoardScore{25, 10, 1});
  CHECK(score_board(Board{}, p) == BoardScore{0, 0, 0});

  Board one_off = p.solution;
  one_off.set(2, 2, 'Z');
  CHECK(score_board(one_off, p) == BoardScore{24, 8, 0});
}

TEST_CASE("scoring properties on random grids") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Puzzle p = parse_puzzle_file(grid_json(random_rows(rng))).at(0);
    CHECK(score_board(p.solution, p) == BoardScore{25, 10, 1});
    for (int j = 0; j < 20; ++j) {
      Board b = p.solution;
      const int edits = static_cast<int>(rng() % 6);
      for (int e = 0; e < edits; ++e) {
        const int cell = static_cast<int>(rng() % 25);
        b.set(cell / 5, cell % 5, rng() % 3 == 0 ? kEmpty : static_cast<char>('A' + rng() % 26));
      }
      const auto s = score_board(b, p);
      CHECK((s.letters >= 0 && s.letters <= 25));
      CHECK((s.words >= 0 && s.words <= 10));
      CHECK((s.game == 0 || s.game == 1));
      CHECK((s.game == 1) == (s.letters == 25));
      CHECK((s.letters == 25) == (s.words == 10));
    }
  }
}

TEST_CASE("non-conflicting placements commute and correct words never lose letters") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Puzzle p = parse_puzzle_file(grid_json(random_rows(rng))).at(0);
    auto slots = all_slots();
    std::shuffle(slots.begin(), slots.end(), rng);
    Board forward;
    int letters = 0;
    for (const Slot& slot : slots) {
      auto next = apply_thought(forward, WordThought{slot, p.solution.word_at(slot)});
      REQUIRE(next);
      forward = *next;
      const int now = score_board(forward, p).letters;
      CHECK(now >= letters);
      letters = now;
    }
    Board backward;
    for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
      backward = *apply_thought(backward, WordThought{*it, p.solution.word_at(*it)});
    }
    CHECK(forward == backward);
    CHECK(forward == p.solution);
  }
}

TEST_CASE("task proposals") {
  CrosswordTask task(heart());
  StateStore store;
  auto root = store.make_root(task.input());
  CHECK(task.parse_proposals(*root, "h1. shown\nv5. naled", 5) == std::vector<std::string>{"h1. SHOWN", "v5. NALED"});
  CHECK(task.parse_proposals(*root, "h6. hello\nh2. hi\n", 5).empty());
  CHECK(task.parse_proposals(*root, "h1. heart\nh2. ember\nh3. abuse", 2).size() == 2);

  auto s1 = store.extend(*root, "h1. HEART");
  CHECK(task.parse_proposals(*s1, "v1. train\nv1. hello\nh1. hears", 5) == std::vector<std::string>{"v1. HELLO"});
  CHECK_FALSE(task.is_terminal(*s1));
}

TEST_CASE("value decoding") {
  CrosswordTask task(heart());
  CHECK(task.parse_value("sure") == 20.0);
  CHECK(task.parse_value("maybe") == 1.0);
  CHECK(task.parse_value("impossible") == 0.001);
  CHECK(task.parse_value("#$%") == 0.001);
}

TEST_CASE("verdicts") {
  CrosswordTask task(heart());
  const auto perfect = task.check_success(heart().solution.to_string());
  CHECK(perfect.at("letters") == 25);
  CHECK(perfect.at("words") == 10);
  CHECK(perfect.at("game") == 1);
  const auto nothing = task.check_success("");
  CHECK(nothing.at("letters") == 0);
  CHECK(task.extract_answer("Output:\nH E A R T\nEMBER\nABUSE\nRESIN\nTREND\n") == heart().solution.to_string());
}

namespace {

void evaluated(Transcript& t, std::vector<std::string> thoughts, double score) {
  t.add("evaluate", {{"thoughts", thoughts}, {"score", number_to_json(score)}});
}

}  // namespace

TEST_CASE("best state tracking") {
  const Puzzle p = heart();
  const std::vector<std::string> words{"h1. HEART", "h2. EMBER", "h3. ABUSE", "h4. RESIN",
                                       "v1. HEART", "v2. EMBER", "v3. ABUSE", "v4. RESIN"};

  SUBCASE("a dead end deep in the tree still counts") {
    Transcript t;
    std::vector<std::string> path;
    for (const auto& w : words) {
      path.push_back(w);
      evaluated(t, path, 20.0 * static_cast<double>(path.size()));
    }
    evaluated(t, {"h5. XXXXX"}, 0.001);
    const Board best = track_best_state(t);
    CHECK(score_board(best, p).words == 8);
  }
  SUBCASE("single state") {
    Transcript t;
    evaluated(t, {"h1. HEART"}, 1.0);
    CHECK(track_best_state(t).word_at(Slot{true, 1}) == "HEART");
  }
  SUBCASE("ties go to the earlier state") {
    Transcript t;
    evaluated(t, {"h1. HEART"}, 5.0);
    evaluated(t, {"h2. EMBER"}, 5.0);
    CHECK(track_best_state(t).word_at(Slot{true, 1}) == "HEART");
  }
  SUBCASE("empty transcript") {
    Transcript t;
    CHECK_THROWS_AS(track_best_state(t), InvalidArgument);
  }
}
