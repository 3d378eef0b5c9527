#pragma once

/**
 * Chat-completions HTTP client. The wire format is the common JSON shape:
 * request {model, messages, temperature, n, max_tokens, stop}, response
 * {choices[].message.content, usage.prompt_tokens, usage.completion_tokens}.
 *
 * The transport is injectable so retry and parsing behaviour is testable
 * without sockets; the default transport is cpp-httplib.
 */

#include <functional>
#include <string>
#include <vector>

#include "t2ot/backend.hpp"

namespace t2ot {

struct HttpEndpointConfig {
  std::string base_url = "http://localhost:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4-0613";
  std::string api_key_env = "T2OT_API_KEY";  // credential read from this env var
  int timeout_seconds = 60;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::vector<int> backoff_ms = {1000, 2000, 4000};
  std::uint64_t jitter_seed = 0;  // taken from the run seed
};

struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_error = false;  // connect failure / timeout
  std::string error;
};

/// (path, json request body, bearer token) -> raw result.
using HttpTransport = std::function<HttpResult(
    const std::string& path, const std::string& body, const std::string& token)>;

/// millisecond sleeper, injectable so retry tests run instantly.
using Sleeper = std::function<void(int)>;

HttpTransport make_httplib_transport(const HttpEndpointConfig& config);

class HttpBackend final : public Backend {
 public:
  HttpBackend(HttpEndpointConfig config, RetryPolicy retry = {},
              HttpTransport transport = nullptr, Sleeper sleeper = nullptr);

  std::string id() const override { return "http:" + config_.model; }

  int last_retry_count() const { return last_retries_; }

 protected:
  CompletionResponse do_complete(const CompletionRequest& request) override;

 private:
  HttpEndpointConfig config_;
  RetryPolicy retry_;
  HttpTransport transport_;
  Sleeper sleeper_;
  int last_retries_ = 0;
};

/// Parses one chat-completions response body. Missing usage triggers the
/// char/4 estimator and flags the usage as estimated. Throws BackendError
/// (protocol) on malformed bodies.
CompletionResponse parse_chat_completion(const std::string& body,
                                         const std::string& prompt,
                                         const std::string& backend_id);

}  // namespace t2ot
