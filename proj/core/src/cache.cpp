#include "tout/cache.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "tout/digest.hpp"

namespace tout {

namespace {

void warn(const std::string& message) { std::cerr << "tout: warning: " << message << '\n'; }

nlohmann::json response_to_json(const BackendResponse& response) {
  nlohmann::json j{{"completions", response.completions}, {"shortfall", response.shortfall}};
  if (response.usage) {
    j["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                  {"completion_tokens", response.usage->completion_tokens}};
  }
  return j;
}

BackendResponse response_from_json(const nlohmann::json& j) {
  BackendResponse response;
  response.completions = j.at("completions").get<std::vector<std::string>>();
  response.shortfall = j.value("shortfall", 0);
  if (j.contains("usage")) {
    response.usage = TokenUsage{j["usage"].value("prompt_tokens", 0LL), j["usage"].value("completion_tokens", 0LL)};
  }
  return response;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  if (directory_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) {
    warn("cache directory " + directory_.string() + " unusable (" + ec.message() + "); caching in memory only");
    directory_.clear();
  }
}

std::string ResponseCache::key(std::string_view backend_id, const BackendRequest& request, int draw) {
  const nlohmann::json fields{
      {"backend", backend_id},
      {"prompt", sha256_hex(request.prompt)},
      {"temperature_mK", quantize_temperature(request.temperature)},
      {"n", request.n},
      {"max_tokens", request.max_tokens},
      {"stop", request.stop},
      {"draw", draw},
  };
  return sha256_hex(fields.dump());
}

std::optional<BackendResponse> ResponseCache::lookup(const std::string& key) {
  std::lock_guard lock(mutex_);
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  if (directory_.empty()) return std::nullopt;

  const auto path = directory_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open");
    auto response = response_from_json(nlohmann::json::parse(in));
    memory_.emplace(key, response);
    return response;
  } catch (const std::exception& e) {
    warn("unreadable cache entry " + path.string() + ": " + e.what());
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const BackendResponse& response) {
  std::lock_guard lock(mutex_);
  memory_[key] = response;
  if (directory_.empty()) return;

  const auto path = directory_ / (key + ".json");
  const auto tmp = directory_ / (key + ".json.tmp");
  std::ofstream out(tmp);
  out << response_to_json(response).dump();
  out.close();
  std::error_code ec;
  if (!out) {
    warn("cannot write cache entry " + tmp.string());
    return;
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) warn("cannot publish cache entry " + path.string() + ": " + ec.message());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return memory_.size();
}

CachedBackend::CachedBackend(Backend& inner, ResponseCache& cache, bool enabled)
    : inner_(inner), cache_(cache), enabled_(enabled) {}

BackendResponse CachedBackend::generate(const BackendRequest& request, int draw) {
  if (!enabled_) {
    {
      std::lock_guard lock(stats_mutex_);
      ++misses_;
    }
    return inner_.generate(request, draw);
  }

  const std::string key = ResponseCache::key(inner_.id(), request, draw);
  if (auto hit = cache_.lookup(key)) {
    std::lock_guard lock(stats_mutex_);
    ++hits_;
    return *hit;
  }
  BackendResponse response = inner_.generate(request, draw);
  // Padded responses are never cached.
  if (response.shortfall == 0) cache_.store(key, response);
  std::lock_guard lock(stats_mutex_);
  ++misses_;
  return response;
}

std::size_t CachedBackend::hits() const {
  std::lock_guard lock(stats_mutex_);
  return hits_;
}

std::size_t CachedBackend::misses() const {
  std::lock_guard lock(stats_mutex_);
  return misses_;
}

}  // namespace tout
