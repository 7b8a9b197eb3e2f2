#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tout/backend.hpp"

namespace tout {

struct HttpBackendOptions {
  std::string base_url = "http://localhost:8000";
  std::string api_key;
  std::string model = "llama-2-70b-chat";
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  int max_in_flight = 8;
  std::chrono::seconds timeout{120};
  /// Ask for all n completions in one request; otherwise issue n requests.
  bool batch_n = true;

  /// Overrides fields from TOUT_API_BASE, TOUT_API_KEY and TOUT_MODEL when set.
  static HttpBackendOptions from_env(HttpBackendOptions defaults);
  static HttpBackendOptions from_env();
};

/// JSON body of a POST to <base>/v1/chat/completions.
nlohmann::json to_wire(const BackendRequest& request, const std::string& model);
/// Inverse of to_wire; throws ParseError on a body it does not recognize.
BackendRequest request_from_wire(const nlohmann::json& body);
/// choices[i].message.content, in order, plus usage when present.
BackendResponse response_from_wire(const nlohmann::json& body);

/// Client for OpenAI-compatible chat-completion endpoints.
///
/// Failed calls (connection errors or non-2xx status) are retried with
/// exponential backoff; once retries run out a BackendUnavailable carrying the
/// last status is thrown. When the provider returns fewer than n choices the
/// missing ones are requested one at a time, then padded with "" and counted
/// in BackendResponse::shortfall.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  std::string id() const override;
  BackendResponse generate(const BackendRequest& request, int draw = 0) override;

  const HttpBackendOptions& options() const noexcept { return options_; }

 private:
  BackendResponse post(const BackendRequest& request);

  struct Impl;
  HttpBackendOptions options_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tout
