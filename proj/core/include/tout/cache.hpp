#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "tout/backend.hpp"

namespace tout {

/// Content-addressed response store: one JSON file per key digest under
/// `directory`, mirrored in memory. With an empty directory it is memory-only.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path directory = {});

  /// Digest of (backend id, prompt digest, temperature to 1e-3, n, max_tokens, stop, draw).
  static std::string key(std::string_view backend_id, const BackendRequest& request, int draw);

  std::optional<BackendResponse> lookup(const std::string& key);
  void store(const std::string& key, const BackendResponse& response);

  std::size_t size() const;

 private:
  std::filesystem::path directory_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, BackendResponse> memory_;
};

/// Backend decorator serving repeated requests from a ResponseCache.
/// Disk failures degrade to uncached operation with a warning on stderr.
class CachedBackend : public Backend {
 public:
  CachedBackend(Backend& inner, ResponseCache& cache, bool enabled = true);

  std::string id() const override { return inner_.id(); }
  BackendResponse generate(const BackendRequest& request, int draw = 0) override;

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  Backend& inner_;
  ResponseCache& cache_;
  bool enabled_;
  mutable std::mutex stats_mutex_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace tout
