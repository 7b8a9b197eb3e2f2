#include "tout/task.hpp"

#include <cctype>
#include <cmath>

namespace tout {

std::string Task::canonicalize_answer(std::string_view answer) const {
  std::size_t begin = 0;
  std::size_t end = answer.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(answer[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(answer[end - 1]))) --end;
  return std::string(answer.substr(begin, end - begin));
}

Verdicts Task::transcript_verdicts(const Transcript&) const { return {}; }

double decode_value(const Task& task, std::string_view completion) noexcept {
  try {
    const double value = task.parse_value(completion);
    if (std::isfinite(value)) return value;
  } catch (...) {
  }
  try {
    return task.min_value();
  } catch (...) {
    return 0.0;
  }
}

}  // namespace tout
