#include "tout/game24.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "tout/error.hpp"

namespace tout::game24 {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string join_numbers(const std::vector<Rational>& numbers) {
  std::string out;
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    if (i) out += ' ';
    out += numbers[i].to_string();
  }
  return out;
}

/// Splits off a leading "Answer:" label and a trailing "= rhs".
struct Equation {
  std::string lhs;
  std::optional<std::string> rhs;
};

Equation split_equation(std::string_view candidate) {
  std::string text = trim(candidate);
  if (lower(text).starts_with("answer:")) text = trim(std::string_view(text).substr(7));
  Equation eq;
  const auto eq_pos = text.find('=');
  if (eq_pos == std::string::npos) {
    eq.lhs = text;
  } else {
    eq.lhs = trim(std::string_view(text).substr(0, eq_pos));
    eq.rhs = trim(std::string_view(text).substr(eq_pos + 1));
  }
  return eq;
}

std::string op_symbol(BinaryOp op) { return std::string(1, static_cast<char>(op)); }

Rational apply(BinaryOp op, const Rational& a, const Rational& b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
  }
  throw InvalidArgument("unknown operator");
}

constexpr std::array<BinaryOp, 4> kOps{BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div};

}  // namespace

std::string Puzzle::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(numbers[i]);
  }
  return out;
}

SolutionCheck check_solution(std::string_view candidate, const Puzzle& puzzle) {
  try {
    const Equation eq = split_equation(candidate);
    if (eq.lhs.empty()) return {false, "empty expression"};
    if (eq.rhs && *eq.rhs != "24") return {false, "right-hand side is not 24"};
    const Expression expr = parse_expression(eq.lhs);

    auto used = expr.literals();
    std::vector<std::int64_t> expected(puzzle.numbers.begin(), puzzle.numbers.end());
    std::sort(used.begin(), used.end());
    std::sort(expected.begin(), expected.end());
    if (used != expected) return {false, "numbers used do not match the puzzle exactly once each"};

    const Rational value = expr.eval();
    if (value != Rational(24)) return {false, "evaluates to " + value.to_string() + ", not 24"};
    return {true, {}};
  } catch (const ParseError& e) {
    return {false, std::string("parse error: ") + e.what()};
  } catch (const ArithmeticError& e) {
    return {false, std::string("arithmetic error: ") + e.what()};
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
}

std::optional<Expression> brute_force_solvable(const Puzzle& puzzle) {
  std::array<std::int64_t, 4> order = puzzle.numbers;
  std::sort(order.begin(), order.end());
  const Rational target(24);

  do {
    const auto lit = [&](int i) { return Expression::literal(order[i]); };
    for (BinaryOp o1 : kOps) {
      for (BinaryOp o2 : kOps) {
        for (BinaryOp o3 : kOps) {
          using E = Expression;
          const std::array<Expression, 5> shapes{
              E::binary(o3, E::binary(o2, E::binary(o1, lit(0), lit(1)), lit(2)), lit(3)),
              E::binary(o3, E::binary(o1, lit(0), E::binary(o2, lit(1), lit(2))), lit(3)),
              E::binary(o2, E::binary(o1, lit(0), lit(1)), E::binary(o3, lit(2), lit(3))),
              E::binary(o1, lit(0), E::binary(o3, E::binary(o2, lit(1), lit(2)), lit(3))),
              E::binary(o1, lit(0), E::binary(o2, lit(1), E::binary(o3, lit(2), lit(3)))),
          };
          for (const auto& candidate : shapes) {
            try {
              if (candidate.eval() == target) return candidate;
            } catch (const ArithmeticError&) {
              // division by zero in this branch
            }
          }
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return std::nullopt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

}  // namespace

std::vector<Puzzle> parse_puzzles_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw LoadError("puzzle CSV is empty");
  const auto header = split_csv_line(lines.front());
  int rank_col = -1;
  int puzzle_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    if (name == "rank") rank_col = static_cast<int>(i);
    if (name == "puzzle" || name == "puzzles") puzzle_col = static_cast<int>(i);
  }
  if (rank_col < 0 || puzzle_col < 0) throw LoadError("puzzle CSV needs 'rank' and 'puzzle' columns");

  std::vector<Puzzle> puzzles;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto fields = split_csv_line(lines[row]);
    const std::string where = "puzzle CSV line " + std::to_string(row + 1);
    if (static_cast<int>(fields.size()) <= std::max(rank_col, puzzle_col)) throw LoadError(where + ": missing fields");
    Puzzle puzzle;
    try {
      puzzle.index = std::stoi(fields[rank_col]);
    } catch (const std::exception&) {
      throw LoadError(where + ": bad rank '" + fields[rank_col] + "'");
    }
    std::istringstream numbers(fields[puzzle_col]);
    std::vector<std::int64_t> values;
    std::string token;
    while (numbers >> token) {
      const auto r = Rational::parse(token);
      if (!r || !r->is_integer() || r->numerator() <= 0) throw LoadError(where + ": bad number '" + token + "'");
      values.push_back(r->numerator());
    }
    if (values.size() != 4) throw LoadError(where + ": expected exactly 4 numbers");
    std::copy(values.begin(), values.end(), puzzle.numbers.begin());
    puzzles.push_back(puzzle);
  }
  return puzzles;
}

std::vector<Puzzle> load_puzzles_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open puzzle file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_puzzles_csv(buffer.str());
}

std::string Step::to_string() const {
  return lhs.to_string() + " " + op_symbol(op) + " " + rhs.to_string() + " = " + result.to_string() +
         " (left: " + join_numbers(left) + ")";
}

std::optional<Step> parse_step(std::string_view line, const std::vector<Rational>& available) {
  static const std::regex kStep(
      R"(^\s*(-?\d+(?:/\d+)?)\s*(\+|-|\*|/|x|\xC3\x97|\xC3\xB7)\s*(-?\d+(?:/\d+)?)\s*=\s*(-?\d+(?:/\d+)?)\s*\(\s*left\s*:\s*([^)]*)\))",
      std::regex::icase);
  const std::string text(line);
  std::smatch match;
  if (!std::regex_search(text, match, kStep)) return std::nullopt;

  Step step;
  const auto lhs = Rational::parse(match[1].str());
  const auto rhs = Rational::parse(match[3].str());
  const auto result = Rational::parse(match[4].str());
  if (!lhs || !rhs || !result) return std::nullopt;
  step.lhs = *lhs;
  step.rhs = *rhs;
  step.result = *result;
  const std::string op = match[2].str();
  if (op == "+") step.op = BinaryOp::add;
  else if (op == "-") step.op = BinaryOp::sub;
  else if (op == "/" || op == "\xC3\xB7") step.op = BinaryOp::div;
  else step.op = BinaryOp::mul;

  std::string left_text = match[5].str();
  std::replace(left_text.begin(), left_text.end(), ',', ' ');
  std::istringstream left_in(left_text);
  std::string token;
  while (left_in >> token) {
    const auto r = Rational::parse(token);
    if (!r) return std::nullopt;
    step.left.push_back(*r);
  }
  std::sort(step.left.begin(), step.left.end());

  try {
    if (apply(step.op, step.lhs, step.rhs) != step.result) return std::nullopt;
  } catch (const ArithmeticError&) {
    return std::nullopt;
  }

  std::vector<Rational> pool = available;
  for (const Rational& operand : {step.lhs, step.rhs}) {
    auto it = std::find(pool.begin(), pool.end(), operand);
    if (it == pool.end()) return std::nullopt;
    pool.erase(it);
  }
  pool.push_back(step.result);
  std::sort(pool.begin(), pool.end());
  if (pool != step.left) return std::nullopt;
  return step;
}

std::vector<Rational> remaining_numbers(const State& state) {
  std::vector<Rational> numbers;
  std::string source;
  if (state.thoughts.empty()) {
    source = state.input;
  } else {
    const std::string& last = state.thoughts.back();
    const auto open = last.find("(left:");
    const auto close = last.find(')', open);
    if (open == std::string::npos || close == std::string::npos) {
      throw InvalidArgument("game24 thought lacks a '(left: ...)' list: " + last);
    }
    source = last.substr(open + 6, close - open - 6);
  }
  std::istringstream in(source);
  std::string token;
  while (in >> token) {
    const auto r = Rational::parse(token);
    if (!r) throw InvalidArgument("game24: bad number '" + token + "' in state");
    numbers.push_back(*r);
  }
  std::sort(numbers.begin(), numbers.end());
  return numbers;
}

Game24Task::Game24Task(Puzzle puzzle, ValueMap values) : puzzle_(puzzle), values_(values) {}

std::string Game24Task::problem_id() const { return std::to_string(puzzle_.index); }

std::string Game24Task::propose_prompt(const State& state, int k) const {
  std::ostringstream out;
  out << "Use numbers and basic arithmetic operations (+ - * /) to reach 24. "
         "Each step combines two of the remaining numbers into one.\n"
      << "Propose up to " << k
      << " possible next steps, one per line, in the form \"a op b = c (left: remaining numbers)\".\n"
      << "Input: 2 8 8 14\n"
      << "Possible next steps:\n"
      << "2 + 8 = 10 (left: 8 10 14)\n"
      << "14 - 8 = 6 (left: 2 6 8)\n"
      << "8 / 2 = 4 (left: 4 8 14)\n"
      << "Input: " << join_numbers(remaining_numbers(state)) << "\n"
      << "Possible next steps:\n";
  return out.str();
}

std::vector<std::string> Game24Task::parse_proposals(const State& state, std::string_view completion,
                                                     int k) const {
  std::vector<std::string> thoughts;
  if (state.depth() >= 3 || k <= 0) return thoughts;
  const auto available = remaining_numbers(state);
  std::set<std::string> seen;
  for (const auto& line : lines_of(completion)) {
    const auto step = parse_step(line, available);
    if (!step) continue;
    std::string text = step->to_string();
    if (!seen.insert(text).second) continue;
    thoughts.push_back(std::move(text));
    if (static_cast<int>(thoughts.size()) == k) break;
  }
  return thoughts;
}

std::string Game24Task::value_prompt(const State& state) const {
  std::ostringstream out;
  out << "Evaluate if the given numbers can reach 24 using + - * / with each number used exactly once. "
         "Answer with one word: sure, likely or impossible.\n"
      << "Input: 4 4 10\nJudgement: sure\n"
      << "Input: 1 3 3\nJudgement: impossible\n"
      << "Input: " << join_numbers(remaining_numbers(state)) << "\n"
      << "Judgement:";
  return out.str();
}

double Game24Task::parse_value(std::string_view completion) const {
  static const std::regex kWord(R"(\b(sure|likely|impossible)\b)", std::regex::icase);
  const std::string text = lower(completion);
  std::string last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kWord); it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
  }
  if (last == "sure") return values_.sure;
  if (last == "likely") return values_.likely;
  return values_.impossible;
}

bool Game24Task::is_terminal(const State& state) const { return state.depth() >= 3; }

std::string Game24Task::final_prompt(const State& state) const {
  std::ostringstream out;
  out << "Use numbers and basic arithmetic operations (+ - * /) to obtain 24. "
         "Write the final answer as a single expression that uses each input number exactly once.\n"
      << "Input: " << input() << "\nSteps:\n";
  for (const auto& thought : state.thoughts) out << thought << "\n";
  out << "Answer:";
  return out.str();
}

std::string Game24Task::final_output(const State&, std::string_view completion) const {
  if (auto answer = extract_answer(completion)) return *answer;
  return trim(completion);
}

std::string Game24Task::io_prompt() const {
  return "Use numbers and basic arithmetic operations (+ - * /) to obtain 24.\n"
         "Input: 4 9 10 13\nAnswer: (10 - 4) * (13 - 9) = 24\n"
         "Input: " + input() + "\nAnswer:";
}

std::string Game24Task::cot_prompt() const {
  return "Use numbers and basic arithmetic operations (+ - * /) to obtain 24. "
         "Each step, you are only allowed to choose two of the remaining numbers to obtain a new number.\n"
         "Input: 4 9 10 13\nSteps:\n13 - 9 = 4 (left: 4 4 10)\n10 - 4 = 6 (left: 4 6)\n4 * 6 = 24 (left: 24)\n"
         "Answer: (10 - 4) * (13 - 9) = 24\n"
         "Input: " + input() + "\nSteps:\n";
}

std::optional<std::string> Game24Task::extract_answer(std::string_view completion) const {
  const auto lines = lines_of(completion);
  std::optional<std::string> chosen;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (lower(*it).find("answer:") != std::string::npos) {
      chosen = *it;
      break;
    }
  }
  if (!chosen) {
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      if (!trim(*it).empty()) {
        chosen = *it;
        break;
      }
    }
  }
  if (!chosen) return std::nullopt;
  std::string text = *chosen;
  const auto label = lower(text).find("answer:");
  if (label != std::string::npos) text = text.substr(label + 7);
  const Equation eq = split_equation(text);
  if (eq.rhs && *eq.rhs != "24") return std::nullopt;
  try {
    return parse_expression(eq.lhs).to_string() + "=24";
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::string Game24Task::canonicalize_answer(std::string_view answer) const {
  const Equation eq = split_equation(answer);
  try {
    return parse_expression(eq.lhs).to_string() + "=24";
  } catch (const ParseError&) {
    return trim(answer);
  }
}

Verdicts Game24Task::check_success(std::string_view output) const {
  return {{"success", check_solution(output, puzzle_).ok ? 1.0 : 0.0}};
}

bool Game24Task::solved(const Verdicts& verdicts) const {
  auto it = verdicts.find("success");
  return it != verdicts.end() && it->second == 1.0;
}

}  // namespace tout::game24
