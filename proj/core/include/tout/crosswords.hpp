#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tout/task.hpp"

namespace tout::crosswords {

inline constexpr int kSize = 5;
inline constexpr char kEmpty = '.';

/// h1..h5 are rows 1..5, v1..v5 are columns 1..5.
struct Slot {
  bool horizontal = true;
  int number = 1;  ///< 1-based

  std::string to_string() const;
  /// "h1".."v5", case-insensitive; nullopt otherwise.
  static std::optional<Slot> parse(std::string_view text);
  /// 0-based (row, column) of letter i of this slot.
  std::pair<int, int> cell(int i) const noexcept;
  bool operator==(const Slot&) const = default;
};

/// All ten slots in h1..h5, v1..v5 order.
std::array<Slot, 10> all_slots();

struct WordThought {
  Slot slot;
  std::string word;  ///< five uppercase letters

  /// "h1. SHOWN"
  std::string to_string() const;
};

class Board {
 public:
  Board();

  char at(int row, int col) const { return cells_.at(row * kSize + col); }
  void set(int row, int col, char letter);
  bool filled(int row, int col) const { return at(row, col) != kEmpty; }
  bool full() const;
  int filled_count() const;
  /// The five cells of a slot, kEmpty where unfilled.
  std::string word_at(const Slot& slot) const;

  /// Five lines of five characters, "." for empty.
  std::string to_string() const;
  /// Inverse of to_string; also accepts lower-case letters. nullopt on bad shape.
  static std::optional<Board> parse(std::string_view text);

  bool operator==(const Board&) const = default;

 private:
  std::array<char, kSize * kSize> cells_{};
};

struct Puzzle {
  std::string id;
  std::array<std::string, 5> horizontal_clues;
  std::array<std::string, 5> vertical_clues;
  Board solution;
};

/// JSON array of {"clues": [10 texts], "answers": [10 words]} with horizontal
/// entries first. Crossing letters must agree; errors name the puzzle index.
std::vector<Puzzle> parse_puzzle_file(std::string_view text);
std::vector<Puzzle> load_puzzle_file(const std::filesystem::path& path);

/// Writes the word into its slot. nullopt when an already-filled cell holds a
/// different letter; the board is never overwritten.
std::optional<Board> apply_thought(const Board& board, const WordThought& thought);

/// Parses "h1. shown" style lines; nullopt for a bad slot or a word that is not
/// five letters.
std::optional<WordThought> parse_thought(std::string_view line);

struct BoardScore {
  int letters = 0;  ///< 0..25
  int words = 0;    ///< 0..10
  int game = 0;     ///< 1 iff every letter matches
  bool operator==(const BoardScore&) const = default;
};

/// Empty cells count as wrong letters.
BoardScore score_board(const Board& board, const Puzzle& puzzle);

/// Board reached by applying a state's thoughts to an empty grid.
Board board_of(const State& state);

/// Board of the highest-scoring state evaluated anywhere in the transcript,
/// earliest on ties. Throws InvalidArgument when nothing was evaluated.
Board track_best_state(const Transcript& transcript);

/// sure / maybe / impossible
struct ValueMap {
  double sure = 20.0;
  double maybe = 1.0;
  double impossible = 0.001;
};

class CrosswordTask final : public Task {
 public:
  explicit CrosswordTask(Puzzle puzzle, ValueMap values = {});

  const Puzzle& puzzle() const noexcept { return puzzle_; }

  std::string name() const override { return "crosswords"; }
  std::string problem_id() const override { return puzzle_.id; }
  std::string input() const override;
  int max_steps() const override { return 10; }

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

  /// letters, words, game.
  Verdicts check_success(std::string_view output) const override;
  bool solved(const Verdicts& verdicts) const override;
  /// best_letters, best_words, best_game from track_best_state.
  Verdicts transcript_verdicts(const Transcript& transcript) const override;

 private:
  std::string render(const State& state) const;

  Puzzle puzzle_;
  ValueMap values_;
};

}  // namespace tout::crosswords
