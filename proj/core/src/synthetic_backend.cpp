#include <charconv>
#include <random>
#include <sstream>

#include "tout/backend.hpp"
#include "tout/digest.hpp"
#include "tout/error.hpp"

namespace tout {

namespace {

struct ParsedPrompt {
  std::string kind;
  std::string key;
  bool has_key = false;
};

ParsedPrompt parse_prompt(std::string_view prompt) {
  ParsedPrompt parsed;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= prompt.size()) {
    std::size_t end = prompt.find('\n', pos);
    if (end == std::string_view::npos) end = prompt.size();
    std::string_view line = prompt.substr(pos, end - pos);
    if (first) {
      const auto space = line.find(' ');
      parsed.kind = std::string(line.substr(0, space));
      first = false;
    } else if (line.starts_with("state: ") || line == "state:") {
      parsed.key = line.size() > 7 ? std::string(line.substr(7)) : std::string{};
      parsed.has_key = true;
    }
    pos = end + 1;
  }
  return parsed;
}

}  // namespace

SyntheticOracleBackend::SyntheticOracleBackend(std::map<std::string, double> true_value,
                                               std::map<std::string, double> noise_std,
                                               std::uint64_t seed,
                                               std::map<std::string, std::string> proposals)
    : true_value_(std::move(true_value)),
      noise_std_(std::move(noise_std)),
      proposals_(std::move(proposals)),
      seed_(seed) {
  for (const auto& [key, sigma] : noise_std_) {
    if (!(sigma >= 0.0)) throw InvalidArgument("synthetic oracle: noise_std must be non-negative for " + key);
  }
}

std::string SyntheticOracleBackend::id() const { return "synthetic:" + std::to_string(seed_); }

double SyntheticOracleBackend::sample(const std::string& key, int j) const {
  auto value_it = true_value_.find(key);
  if (value_it == true_value_.end()) throw InvalidArgument("synthetic oracle: unknown state '" + key + "'");
  const auto noise_it = noise_std_.find(key);
  const double sigma = noise_it == noise_std_.end() ? 0.0 : noise_it->second;
  if (sigma == 0.0) return value_it->second;

  const std::uint64_t key_hash = stable_hash64(key);
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(key_hash), static_cast<std::uint32_t>(key_hash >> 32),
                    static_cast<std::uint32_t>(j)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> standard_normal(0.0, 1.0);
  return value_it->second + sigma * standard_normal(rng);
}

BackendResponse SyntheticOracleBackend::generate(const BackendRequest& request, int draw) {
  request.validate();
  const ParsedPrompt parsed = parse_prompt(request.prompt);
  BackendResponse response;
  response.completions.reserve(request.n);
  for (int j = 0; j < request.n; ++j) {
    std::string text;
    if (parsed.kind == "evaluate" && parsed.has_key && true_value_.contains(parsed.key)) {
      text = encode_value(sample(parsed.key, draw + j));
    } else if (parsed.kind == "propose" && parsed.has_key) {
      auto it = proposals_.find(parsed.key);
      if (it != proposals_.end()) text = it->second;
    } else if (parsed.kind == "final" && parsed.has_key) {
      text = "answer: " + parsed.key;
    }
    response.completions.push_back(std::move(text));
  }
  return response;
}

std::string SyntheticOracleBackend::encode_value(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw InvalidArgument("synthetic oracle: cannot encode value");
  return "value: " + std::string(buffer, end);
}

std::optional<double> SyntheticOracleBackend::decode_value(std::string_view text) {
  const auto pos = text.find("value:");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = text.substr(pos + 6);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc{} || ptr == rest.data()) return std::nullopt;
  return value;
}

std::string SyntheticOracleBackend::evaluate_prompt(std::string_view key) {
  return "evaluate\nstate: " + std::string(key);
}

std::string SyntheticOracleBackend::propose_prompt(std::string_view key, int k) {
  return "propose " + std::to_string(k) + "\nstate: " + std::string(key);
}

std::string SyntheticOracleBackend::final_prompt(std::string_view key) {
  return "final\nstate: " + std::string(key);
}

}  // namespace tout
