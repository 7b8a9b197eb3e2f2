#include "tout/backend.hpp"

#include <chrono>
#include <cmath>

#include "tout/digest.hpp"
#include "tout/error.hpp"

namespace tout {

void BackendRequest::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0 || temperature > 2.0) {
    throw InvalidArgument("backend request: temperature must be finite and within [0, 2]");
  }
  if (n < 1) throw InvalidArgument("backend request: n must be at least 1");
  if (max_tokens < 1) throw InvalidArgument("backend request: max_tokens must be at least 1");
}

std::int64_t quantize_temperature(double temperature) noexcept {
  return static_cast<std::int64_t>(std::llround(temperature * 1000.0));
}

BackendResponse generate_logged(Backend& backend, const BackendRequest& request, int draw,
                                Transcript& transcript) {
  const auto start = std::chrono::steady_clock::now();
  BackendResponse response = backend.generate(request, draw);
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

  nlohmann::json event{
      {"backend", backend.id()},
      {"prompt_digest", sha256_hex(request.prompt)},
      {"temperature", request.temperature},
      {"n", request.n},
      {"draw", draw},
      {"completions", response.completions},
      {"latency_ms", elapsed.count()},
  };
  if (response.shortfall > 0) event["shortfall"] = response.shortfall;
  if (response.usage) {
    event["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                      {"completion_tokens", response.usage->completion_tokens}};
  }
  transcript.add("generate", std::move(event));
  return response;
}

ScriptedBackend::ScriptedBackend(std::string default_text) : default_text_(std::move(default_text)) {}

void ScriptedBackend::add(std::string_view prompt, double temperature, int index, std::string completion) {
  add_by_digest(sha256_hex(prompt), temperature, index, std::move(completion));
}

void ScriptedBackend::add_by_digest(std::string prompt_digest, double temperature, int index,
                                    std::string completion) {
  script_[Key{std::move(prompt_digest), quantize_temperature(temperature), index}] = std::move(completion);
}

BackendResponse ScriptedBackend::generate(const BackendRequest& request, int draw) {
  request.validate();
  const std::string digest = sha256_hex(request.prompt);
  const std::int64_t temperature = quantize_temperature(request.temperature);
  BackendResponse response;
  response.completions.reserve(request.n);
  for (int j = 0; j < request.n; ++j) {
    auto it = script_.find(Key{digest, temperature, draw + j});
    response.completions.push_back(it == script_.end() ? default_text_ : it->second);
  }
  return response;
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& j) {
  ScriptedBackend backend(j.value("default", std::string{}));
  for (const auto& entry : j.value("entries", nlohmann::json::array())) {
    const double temperature = entry.value("temperature", 0.0);
    const int index = entry.value("index", 0);
    std::string completion = entry.at("completion").get<std::string>();
    if (entry.contains("prompt_digest")) {
      backend.add_by_digest(entry.at("prompt_digest").get<std::string>(), temperature, index,
                            std::move(completion));
    } else {
      backend.add(entry.at("prompt").get<std::string>(), temperature, index, std::move(completion));
    }
  }
  return backend;
}

nlohmann::json ScriptedBackend::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, completion] : script_) {
    const auto& [digest, temperature, index] = key;
    entries.push_back({{"prompt_digest", digest},
                       {"temperature", static_cast<double>(temperature) / 1000.0},
                       {"index", index},
                       {"completion", completion}});
  }
  return {{"default", default_text_}, {"entries", std::move(entries)}};
}

ScriptedBackend ScriptedBackend::from_transcript(const Transcript& transcript) {
  ScriptedBackend backend;
  for (const auto* event : transcript.of_type("generate")) {
    const auto digest = event->at("prompt_digest").get<std::string>();
    const double temperature = event->at("temperature").get<double>();
    const int draw = event->value("draw", 0);
    const auto& completions = event->at("completions");
    for (std::size_t j = 0; j < completions.size(); ++j) {
      backend.add_by_digest(digest, temperature, draw + static_cast<int>(j),
                            completions[j].get<std::string>());
    }
  }
  return backend;
}

}  // namespace tout
