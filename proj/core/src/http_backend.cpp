#include "tout/http_backend.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>

#include "tout/error.hpp"

namespace tout {

namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("api base URL needs a scheme: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  Endpoint endpoint;
  endpoint.scheme_host_port = base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? std::string{} : base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  endpoint.path = prefix + "/v1/chat/completions";
  return endpoint;
}

}  // namespace

HttpBackendOptions HttpBackendOptions::from_env() { return from_env(HttpBackendOptions{}); }

HttpBackendOptions HttpBackendOptions::from_env(HttpBackendOptions defaults) {
  if (const char* base = std::getenv("TOUT_API_BASE"); base && *base) defaults.base_url = base;
  if (const char* key = std::getenv("TOUT_API_KEY"); key && *key) defaults.api_key = key;
  if (const char* model = std::getenv("TOUT_MODEL"); model && *model) defaults.model = model;
  return defaults;
}

nlohmann::json to_wire(const BackendRequest& request, const std::string& model) {
  nlohmann::json body{
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"n", request.n},
      {"max_tokens", request.max_tokens},
  };
  if (!request.stop.empty()) body["stop"] = request.stop;
  return body;
}

BackendRequest request_from_wire(const nlohmann::json& body) {
  try {
    BackendRequest request;
    const auto& messages = body.at("messages");
    if (!messages.is_array() || messages.size() != 1) throw ParseError("expected exactly one message", 0);
    request.prompt = messages.at(0).at("content").get<std::string>();
    request.temperature = body.at("temperature").get<double>();
    request.n = body.value("n", 1);
    request.max_tokens = body.at("max_tokens").get<int>();
    if (body.contains("stop")) {
      const auto& stop = body.at("stop");
      if (stop.is_string()) {
        request.stop = {stop.get<std::string>()};
      } else {
        request.stop = stop.get<std::vector<std::string>>();
      }
    }
    return request;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed chat-completion request: ") + e.what(), 0);
  }
}

BackendResponse response_from_wire(const nlohmann::json& body) {
  try {
    BackendResponse response;
    for (const auto& choice : body.at("choices")) {
      const auto& content = choice.at("message").at("content");
      response.completions.push_back(content.is_null() ? std::string{} : content.get<std::string>());
    }
    if (body.contains("usage") && body["usage"].is_object()) {
      response.usage = TokenUsage{body["usage"].value("prompt_tokens", 0LL),
                                  body["usage"].value("completion_tokens", 0LL)};
    }
    return response;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed chat-completion response: ") + e.what(), 0);
  }
}

struct HttpBackend::Impl {
  explicit Impl(int max_in_flight) : in_flight(max_in_flight) {}
  Endpoint endpoint;
  std::counting_semaphore<4096> in_flight;
};

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.max_in_flight < 1 || options_.max_in_flight > 4096) {
    throw ConfigError("max_in_flight must be within [1, 4096]");
  }
  if (options_.max_retries < 0) throw ConfigError("max_retries must be non-negative");
  impl_ = std::make_unique<Impl>(options_.max_in_flight);
  impl_->endpoint = split_base_url(options_.base_url);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::id() const { return "http:" + options_.model + "@" + options_.base_url; }

BackendResponse HttpBackend::post(const BackendRequest& request) {
  const std::string body = to_wire(request, options_.model).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  int last_status = -1;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.initial_backoff * (1LL << (attempt - 1)));

    httplib::Result result;
    {
      impl_->in_flight.acquire();
      struct Release {
        std::counting_semaphore<4096>& sem;
        ~Release() { sem.release(); }
      } release{impl_->in_flight};
      httplib::Client client(impl_->endpoint.scheme_host_port);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      result = client.Post(impl_->endpoint.path, headers, body, "application/json");
    }
    if (!result) {
      last_status = -1;
      last_error = httplib::to_string(result.error());
      continue;
    }
    last_status = result->status;
    if (result->status < 200 || result->status >= 300) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    try {
      return response_from_wire(nlohmann::json::parse(result->body));
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw BackendUnavailable("chat-completion endpoint " + options_.base_url + " failed after " +
                               std::to_string(options_.max_retries + 1) + " attempts: " + last_error,
                           last_status);
}

BackendResponse HttpBackend::generate(const BackendRequest& request, int /*draw*/) {
  request.validate();

  BackendResponse response;
  auto absorb = [&response](BackendResponse part) {
    for (auto& text : part.completions) response.completions.push_back(std::move(text));
    if (part.usage) {
      if (!response.usage) response.usage = TokenUsage{};
      response.usage->prompt_tokens += part.usage->prompt_tokens;
      response.usage->completion_tokens += part.usage->completion_tokens;
    }
  };

  BackendRequest single = request;
  single.n = 1;
  if (options_.batch_n) {
    absorb(post(request));
    if (static_cast<int>(response.completions.size()) > request.n) response.completions.resize(request.n);
  }
  // Sequential fallback, also used to top up a short batch.
  const int missing = request.n - static_cast<int>(response.completions.size());
  for (int i = 0; i < missing; ++i) {
    BackendResponse part = post(single);
    if (!part.completions.empty()) part.completions.resize(1);
    absorb(std::move(part));
  }
  while (static_cast<int>(response.completions.size()) < request.n) {
    response.completions.emplace_back();
    ++response.shortfall;
  }
  return response;
}

}  // namespace tout
