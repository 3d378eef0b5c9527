#include "t2ot/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace t2ot {

using nlohmann::json;

HttpTransport make_httplib_transport(const HttpEndpointConfig& config) {
  return [config](const std::string& path, const std::string& body,
                  const std::string& token) -> HttpResult {
    httplib::Client client(config.base_url);
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      return {0, "", true, httplib::to_string(res.error())};
    }
    return {res->status, res->body, false, ""};
  };
}

HttpBackend::HttpBackend(HttpEndpointConfig config, RetryPolicy retry,
                         HttpTransport transport, Sleeper sleeper)
    : config_(std::move(config)),
      retry_(std::move(retry)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)) {
  if (!transport_) transport_ = make_httplib_transport(config_);
  if (!sleeper_) {
    sleeper_ = [](int ms) {
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    };
  }
}

CompletionResponse HttpBackend::do_complete(const CompletionRequest& request) {
  json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"n", request.sample_count},
      {"max_tokens", request.max_output},
  };
  if (!request.stop.empty()) body["stop"] = request.stop;

  std::string token;
  if (!config_.api_key_env.empty()) {
    if (const char* v = std::getenv(config_.api_key_env.c_str())) token = v;
  }

  std::mt19937_64 jitter_rng(mix_seed(retry_.jitter_seed, request.seed));
  last_retries_ = 0;
  std::string last_error;
  BackendErrorKind last_kind = BackendErrorKind::protocol;

  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt < retry_.max_attempts; ++attempt) {
    if (attempt > 0) {
      const std::size_t slot =
          std::min<std::size_t>(attempt - 1, retry_.backoff_ms.size() - 1);
      const int base = retry_.backoff_ms.empty() ? 0 : retry_.backoff_ms[slot];
      std::uniform_int_distribution<int> jitter(0, std::max(1, base / 4));
      sleeper_(base + jitter(jitter_rng));
      last_retries_ += 1;
    }
    HttpResult result = transport_(config_.path, body.dump(), token);
    if (result.transport_error) {
      last_error = "transport: " + result.error;
      last_kind = BackendErrorKind::timeout;
      continue;  // retryable
    }
    if (result.status == 429 || result.status >= 500) {
      last_error = "status " + std::to_string(result.status);
      last_kind = BackendErrorKind::rate_limit;
      continue;  // retryable
    }
    if (result.status == 401 || result.status == 403) {
      throw BackendError(BackendErrorKind::refusal,
                         "authentication rejected (status " +
                             std::to_string(result.status) + ")");
    }
    if (result.status != 200) {
      throw BackendError(BackendErrorKind::protocol,
                         "unexpected status " + std::to_string(result.status));
    }
    CompletionResponse response =
        parse_chat_completion(result.body, request.prompt, id());
    response.retries = last_retries_;
    response.latency_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started)
            .count();
    return response;
  }
  throw BackendError(last_kind, "gave up after " +
                                    std::to_string(retry_.max_attempts) +
                                    " attempts: " + last_error);
}

CompletionResponse parse_chat_completion(const std::string& body,
                                         const std::string& prompt,
                                         const std::string& backend_id) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") ||
      !doc["choices"].is_array() || doc["choices"].empty()) {
    throw BackendError(BackendErrorKind::protocol,
                       "malformed chat-completions response");
  }
  CompletionResponse response;
  for (const auto& choice : doc["choices"]) {
    if (!choice.contains("message") || !choice["message"].contains("content")) {
      throw BackendError(BackendErrorKind::protocol,
                         "choice without message content");
    }
    response.samples.push_back(choice["message"]["content"].get<std::string>());
  }
  if (doc.contains("usage") && doc["usage"].contains("prompt_tokens") &&
      doc["usage"].contains("completion_tokens")) {
    response.usage.prompt_tokens = doc["usage"]["prompt_tokens"].get<long long>();
    response.usage.completion_tokens =
        doc["usage"]["completion_tokens"].get<long long>();
    response.usage.estimated = false;
  } else {
    response.usage.prompt_tokens = estimate_tokens(prompt);
    for (const std::string& s : response.samples) {
      response.usage.completion_tokens += estimate_tokens(s);
    }
    response.usage.estimated = true;
  }
  response.backend_id = backend_id;
  return response;
}

}  // namespace t2ot
