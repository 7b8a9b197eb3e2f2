#include "tout/crosswords.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tout/error.hpp"

namespace tout::crosswords {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool is_word(std::string_view word) {
  if (word.size() != kSize) return false;
  for (char c : word) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string Slot::to_string() const { return (horizontal ? "h" : "v") + std::to_string(number); }

std::optional<Slot> Slot::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  const char kind = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  if ((kind != 'h' && kind != 'v') || text[1] < '1' || text[1] > '5') return std::nullopt;
  return Slot{kind == 'h', text[1] - '0'};
}

std::pair<int, int> Slot::cell(int i) const noexcept {
  return horizontal ? std::pair{number - 1, i} : std::pair{i, number - 1};
}

std::array<Slot, 10> all_slots() {
  std::array<Slot, 10> slots;
  for (int i = 0; i < kSize; ++i) {
    slots[i] = Slot{true, i + 1};
    slots[kSize + i] = Slot{false, i + 1};
  }
  return slots;
}

std::string WordThought::to_string() const { return slot.to_string() + ". " + word; }

Board::Board() { cells_.fill(kEmpty); }

void Board::set(int row, int col, char letter) {
  if (letter != kEmpty && !std::isupper(static_cast<unsigned char>(letter))) {
    throw InvalidArgument("board cells hold upper-case letters");
  }
  cells_.at(row * kSize + col) = letter;
}

bool Board::full() const { return filled_count() == kSize * kSize; }

int Board::filled_count() const {
  int n = 0;
  for (char c : cells_) n += c != kEmpty;
  return n;
}

std::string Board::word_at(const Slot& slot) const {
  std::string word;
  for (int i = 0; i < kSize; ++i) {
    const auto [r, c] = slot.cell(i);
    word.push_back(at(r, c));
  }
  return word;
}

std::string Board::to_string() const {
  std::string out;
  for (int r = 0; r < kSize; ++r) {
    for (int c = 0; c < kSize; ++c) out.push_back(at(r, c));
    if (r + 1 < kSize) out.push_back('\n');
  }
  return out;
}

std::optional<Board> Board::parse(std::string_view text) {
  std::vector<std::string> rows;
  for (const auto& line : lines_of(text)) {
    std::string row;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) row.push_back(c);
    }
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.size() != kSize) return std::nullopt;
  Board board;
  for (int r = 0; r < kSize; ++r) {
    if (rows[r].size() != kSize) return std::nullopt;
    for (int c = 0; c < kSize; ++c) {
      const char ch = rows[r][c];
      if (ch == kEmpty || ch == '_') continue;
      if (!std::isalpha(static_cast<unsigned char>(ch))) return std::nullopt;
      board.set(r, c, static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    }
  }
  return board;
}

std::vector<Puzzle> parse_puzzle_file(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("crossword file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw LoadError("crossword file must be a JSON array");

  std::vector<Puzzle> puzzles;
  for (std::size_t index = 0; index < doc.size(); ++index) {
    const auto& entry = doc[index];
    const std::string where = "crossword puzzle " + std::to_string(index);
    if (!entry.is_object() || !entry.contains("clues") || !entry.contains("answers")) {
      throw LoadError(where + ": needs 'clues' and 'answers'");
    }
    const auto& clues = entry["clues"];
    const auto& answers = entry["answers"];
    if (!clues.is_array() || clues.size() != 10) throw LoadError(where + ": expected 10 clues");
    if (!answers.is_array() || answers.size() != 10) throw LoadError(where + ": expected 10 answers");

    Puzzle puzzle;
    puzzle.id = entry.contains("id") ? (entry["id"].is_string() ? entry["id"].get<std::string>()
                                                                 : entry["id"].dump())
                                     : std::to_string(index);
    std::array<std::string, 10> words;
    for (int i = 0; i < 10; ++i) {
      if (!clues[i].is_string() || !answers[i].is_string()) throw LoadError(where + ": clues and answers are strings");
      const auto word = answers[i].get<std::string>();
      if (!is_word(word)) {
        throw LoadError(where + ": answer " + all_slots()[i].to_string() + " '" + word + "' is not five letters");
      }
      words[i] = upper(word);
      (i < kSize ? puzzle.horizontal_clues[i] : puzzle.vertical_clues[i - kSize]) = clues[i].get<std::string>();
    }
    for (int r = 0; r < kSize; ++r) {
      for (int c = 0; c < kSize; ++c) {
        if (words[r][c] != words[kSize + c][r]) {
          throw LoadError(where + ": crossing mismatch between h" + std::to_string(r + 1) + " and v" +
                          std::to_string(c + 1));
        }
        puzzle.solution.set(r, c, words[r][c]);
      }
    }
    puzzles.push_back(std::move(puzzle));
  }
  return puzzles;
}

std::vector<Puzzle> load_puzzle_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open crossword file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_puzzle_file(buffer.str());
}

std::optional<Board> apply_thought(const Board& board, const WordThought& thought) {
  if (!is_word(thought.word)) return std::nullopt;
  Board next = board;
  for (int i = 0; i < kSize; ++i) {
    const auto [r, c] = thought.slot.cell(i);
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(thought.word[i])));
    if (board.filled(r, c) && board.at(r, c) != letter) return std::nullopt;
    next.set(r, c, letter);
  }
  return next;
}

std::optional<WordThought> parse_thought(std::string_view line) {
  static const std::regex kPlacement(R"(^\s*([hHvV]\d+)\s*[.:]\s*([A-Za-z]+)\b)");
  const std::string text(line);
  std::smatch match;
  if (!std::regex_search(text, match, kPlacement)) return std::nullopt;
  const auto slot = Slot::parse(match[1].str());
  if (!slot) return std::nullopt;
  const std::string word = match[2].str();
  if (!is_word(word)) return std::nullopt;
  return WordThought{*slot, upper(word)};
}

BoardScore score_board(const Board& board, const Puzzle& puzzle) {
  BoardScore score;
  for (int r = 0; r < kSize; ++r) {
    for (int c = 0; c < kSize; ++c) score.letters += board.at(r, c) == puzzle.solution.at(r, c);
  }
  for (const Slot& slot : all_slots()) score.words += board.word_at(slot) == puzzle.solution.word_at(slot);
  score.game = score.letters == kSize * kSize ? 1 : 0;
  return score;
}

Board board_of(const State& state) {
  Board board;
  for (const auto& text : state.thoughts) {
    const auto thought = parse_thought(text);
    if (!thought) throw InvalidArgument("not a crossword placement: " + text);
    auto next = apply_thought(board, *thought);
    if (!next) throw InvalidArgument("conflicting placement in state: " + text);
    board = *next;
  }
  return board;
}

Board track_best_state(const Transcript& transcript) {
  const nlohmann::json* best = nullptr;
  double best_score = 0.0;
  for (const auto* event : transcript.of_type("evaluate")) {
    const double score = number_from_json(event->at("score"));
    if (!best || score > best_score) {
      best = event;
      best_score = score;
    }
  }
  if (!best) throw InvalidArgument("track_best_state: transcript has no evaluated states");
  State state;
  state.thoughts = best->at("thoughts").get<std::vector<std::string>>();
  return board_of(state);
}

CrosswordTask::CrosswordTask(Puzzle puzzle, ValueMap values) : puzzle_(std::move(puzzle)), values_(values) {}

std::string CrosswordTask::input() const {
  std::string out;
  for (int i = 0; i < kSize; ++i) out += "h" + std::to_string(i + 1) + ". " + puzzle_.horizontal_clues[i] + "\n";
  for (int i = 0; i < kSize; ++i) out += "v" + std::to_string(i + 1) + ". " + puzzle_.vertical_clues[i] + "\n";
  return out;
}

std::string CrosswordTask::render(const State& state) const {
  const Board board = board_of(state);
  std::ostringstream out;
  out << "Current board:\n" << board.to_string() << "\n\nClues and current letters:\n";
  for (const Slot& slot : all_slots()) {
    const auto& clue = slot.horizontal ? puzzle_.horizontal_clues[slot.number - 1]
                                       : puzzle_.vertical_clues[slot.number - 1];
    out << slot.to_string() << ". " << clue << ": " << board.word_at(slot) << "\n";
  }
  return out.str();
}

std::string CrosswordTask::propose_prompt(const State& state, int k) const {
  std::ostringstream out;
  out << "Let's play a 5 x 5 mini crossword, where each word should have exactly 5 letters.\n\n"
      << render(state) << "\n"
      << "Propose up to " << k
      << " answers for unfilled or partially filled clues that agree with the letters already on the board, "
         "one per line, in the form \"h1. shown\" or \"v5. naled\".\n";
  return out.str();
}

std::vector<std::string> CrosswordTask::parse_proposals(const State& state, std::string_view completion,
                                                        int k) const {
  std::vector<std::string> thoughts;
  if (k <= 0) return thoughts;
  const Board board = board_of(state);
  std::set<std::string> seen;
  for (const auto& line : lines_of(completion)) {
    const auto thought = parse_thought(line);
    if (!thought) continue;
    if (board.word_at(thought->slot).find(kEmpty) == std::string::npos) continue;  // slot already complete
    if (!apply_thought(board, *thought)) continue;
    std::string text = thought->to_string();
    if (!seen.insert(text).second) continue;
    thoughts.push_back(std::move(text));
    if (static_cast<int>(thoughts.size()) == k) break;
  }
  return thoughts;
}

std::string CrosswordTask::value_prompt(const State& state) const {
  return "Evaluate whether this partially filled 5 x 5 mini crossword can still be completed so that every "
         "word fits its clue. Answer with one word: sure, maybe or impossible.\n\n" +
         render(state) + "\nJudgement:";
}

double CrosswordTask::parse_value(std::string_view completion) const {
  static const std::regex kWord(R"(\b(sure|maybe|impossible)\b)", std::regex::icase);
  const std::string text(completion);
  std::string last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kWord); it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
    for (char& c : last) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (last == "sure") return values_.sure;
  if (last == "maybe") return values_.maybe;
  return values_.impossible;
}

bool CrosswordTask::is_terminal(const State& state) const { return board_of(state).full(); }

std::string CrosswordTask::final_prompt(const State& state) const {
  return "Let's play a 5 x 5 mini crossword, where each word should have exactly 5 letters.\n\n" + render(state) +
         "\nGive the single most certain remaining answer in the form \"h1. shown\".\n";
}

std::string CrosswordTask::final_output(const State& state, std::string_view completion) const {
  Board board = board_of(state);
  for (const auto& line : lines_of(completion)) {
    if (const auto thought = parse_thought(line)) {
      if (auto next = apply_thought(board, *thought)) {
        board = *next;
        break;
      }
    }
  }
  return board.to_string();
}

std::string CrosswordTask::io_prompt() const {
  return "Solve the 5 x 5 mini crossword. Output the board as 5 lines of 5 letters.\n\n" + input() + "\nOutput:\n";
}

std::string CrosswordTask::cot_prompt() const {
  return "Solve the 5 x 5 mini crossword. First answer each clue with a 5-letter word, one per line "
         "(\"h1. shown\"), then output the board as 5 lines of 5 letters after a line \"Output:\".\n\n" +
         input() + "\nThoughts:\n";
}

std::optional<std::string> CrosswordTask::extract_answer(std::string_view completion) const {
  const auto lines = lines_of(completion);
  std::vector<std::string> rows;
  std::optional<std::string> found;
  for (const auto& line : lines) {
    std::string row;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) row.push_back(c);
    }
    bool ok = row.size() == kSize;
    for (char c : row) ok = ok && (std::isalpha(static_cast<unsigned char>(c)) || c == kEmpty);
    if (ok) {
      rows.push_back(row);
      if (rows.size() >= kSize) {
        std::string block;
        for (std::size_t i = rows.size() - kSize; i < rows.size(); ++i) block += rows[i] + "\n";
        if (auto board = Board::parse(block)) found = board->to_string();
      }
    } else {
      rows.clear();
    }
  }
  return found;
}

Verdicts CrosswordTask::check_success(std::string_view output) const {
  auto board = Board::parse(output);
  if (!board) {
    if (auto extracted = extract_answer(output)) board = Board::parse(*extracted);
  }
  const BoardScore score = board ? score_board(*board, puzzle_) : BoardScore{};
  return {{"letters", score.letters}, {"words", score.words}, {"game", score.game}};
}

bool CrosswordTask::solved(const Verdicts& verdicts) const {
  auto it = verdicts.find("game");
  return it != verdicts.end() && it->second == 1.0;
}

Verdicts CrosswordTask::transcript_verdicts(const Transcript& transcript) const {
  if (transcript.of_type("evaluate").empty()) return {};
  const BoardScore score = score_board(track_best_state(transcript), puzzle_);
  return {{"best_letters", score.letters}, {"best_words", score.words}, {"best_game", score.game}};
}

}  // namespace tout::crosswords
