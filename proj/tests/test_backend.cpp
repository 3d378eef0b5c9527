#include <doctest.h>

#include <map>

#include "t2ot/backend.hpp"
#include "t2ot/http_backend.hpp"

using namespace t2ot;
using nlohmann::json;

namespace {

ScriptedPolicy two_weight_policy(double w_top, double w_other) {
  ScriptedPolicy policy;
  PolicyRule rule;
  rule.phase = kPhasePropose;
  rule.candidates = {{"top", w_top}, {"other", w_other}};
  policy.rules.push_back(rule);
  return policy;
}

double top_frequency(const ScriptedPolicy& policy, double temperature,
                     int draws) {
  CompletionRequest req;
  req.prompt = "anything";
  req.tag = kPhasePropose;
  req.temperature = temperature;
  int top = 0;
  for (int i = 0; i < draws; ++i) {
    req.seed = static_cast<std::uint64_t>(i);
    const auto samples = simulated_sample(policy, "", req, req.seed);
    if (samples.at(0) == "top") ++top;
  }
  return static_cast<double>(top) / draws;
}

}  // namespace

TEST_CASE("simulated backend is deterministic per (request, seed)") {
  SimulatedBackend backend(two_weight_policy(2.0, 1.0), "game24");
  CompletionRequest req;
  req.prompt = "anything";
  req.tag = kPhasePropose;
  req.temperature = 0.9;
  req.sample_count = 3;
  req.seed = 1234;
  const auto a = backend.complete(req);
  const auto b = backend.complete(req);
  CHECK(a.samples == b.samples);
  CHECK(a.samples.size() == 3);
  CHECK(a.latency_ms == 0.0);
  CHECK(a.backend_id == "simulated");
}

TEST_CASE("ledger delta equals the response usage and totals add up") {
  SimulatedBackend backend(two_weight_policy(2.0, 1.0), "game24");
  UsageLedger ledger;
  backend.attach_ledger(&ledger);

  CompletionRequest req;
  req.prompt = "twelve chars";
  req.tag = kPhasePropose;
  req.seed = 9;
  const auto resp = backend.complete(req);
  const auto& phase = ledger.phases().at(kPhasePropose);
  CHECK(phase.prompt_tokens == resp.usage.prompt_tokens);
  CHECK(phase.completion_tokens == resp.usage.completion_tokens);
  CHECK(phase.calls == 1);

  req.tag = kPhaseValue;
  backend.complete(req);
  const auto total = ledger.total();
  long long prompt_sum = 0;
  for (const auto& [tag, usage] : ledger.phases()) {
    prompt_sum += usage.prompt_tokens;
  }
  CHECK(total.prompt_tokens == prompt_sum);
  CHECK(total.calls == 2);

  CHECK_THROWS_AS(ledger.record("x", TokenUsage{-1, 0, false}),
                  std::invalid_argument);
}

TEST_CASE("request validation rejects out-of-range fields") {
  SimulatedBackend backend(two_weight_policy(1.0, 1.0), "game24");
  CompletionRequest req;
  req.prompt = "p";
  req.temperature = 2.5;
  CHECK_THROWS_AS(backend.complete(req), std::invalid_argument);
  req.temperature = 0.7;
  req.sample_count = 0;
  CHECK_THROWS_AS(backend.complete(req), std::invalid_argument);
}

TEST_CASE("near-zero temperature degenerates to the argmax candidate") {
  const auto policy = two_weight_policy(2.0, 1.0);
  CHECK(top_frequency(policy, 0.001, 10000) > 0.99);
}

TEST_CASE("equal weights at temperature one sample uniformly") {
  const auto policy = two_weight_policy(1.0, 1.0);
  const double freq = top_frequency(policy, 1.0, 10000);
  CHECK(freq > 0.47);
  CHECK(freq < 0.53);
}

TEST_CASE("top-candidate probability strictly decreases with temperature") {
  const auto policy = two_weight_policy(2.0, 1.0);
  const double low = top_frequency(policy, 0.2, 10000);
  const double mid = top_frequency(policy, 0.6, 10000);
  const double high = top_frequency(policy, 1.5, 10000);
  CHECK(low > mid);
  CHECK(mid > high);
}

TEST_CASE("policy rules match on task, phase and prompt key") {
  ScriptedPolicy policy;
  policy.fallback = "nothing scripted";
  PolicyRule a;
  a.task = "game24";
  a.phase = kPhasePropose;
  a.key = "7 5 2 6";
  a.candidates = {{"rule-a", 1.0}};
  PolicyRule b;
  b.phase = kPhaseValue;
  b.candidates = {{"rule-b", 1.0}};
  policy.rules = {a, b};

  CHECK(policy.match("game24", kPhasePropose, "numbers: 7 5 2 6") == &policy.rules[0]);
  CHECK(policy.match("game24", kPhasePropose, "numbers: 2 2 6") == nullptr);
  CHECK(policy.match("other-task", kPhasePropose, "7 5 2 6") == nullptr);
  CHECK(policy.match("game24", kPhaseValue, "anything") == &policy.rules[1]);

  SimulatedBackend backend(policy, "game24");
  CompletionRequest req;
  req.prompt = "unmatched";
  req.tag = kPhasePropose;
  const auto resp = backend.complete(req);
  CHECK(resp.samples.at(0) == "nothing scripted");
}

TEST_CASE("policy JSON round-trips") {
  ScriptedPolicy policy = two_weight_policy(2.0, 1.0);
  policy.rules[0].task = "game24";
  policy.rules[0].key = "left: 2 2 6";
  const json doc = policy.to_json();
  const ScriptedPolicy back = ScriptedPolicy::from_json(doc);
  CHECK(back.rules.size() == 1);
  CHECK(back.rules[0].key == "left: 2 2 6");
  CHECK(back.rules[0].candidates[0].weight == 2.0);
  CHECK_THROWS_AS(
      ScriptedPolicy::from_json(json::parse(
          R"({"rules":[{"phase":"propose","candidates":[]}]})")),
      std::invalid_argument);
}

namespace {

const char* kFixtureBody = R"json({
  "choices": [
    {"message": {"role": "assistant", "content": "Answer: (7-5)*2*6"}},
    {"message": {"role": "assistant", "content": "Answer: 6*2*(7-5)"}}
  ],
  "usage": {"prompt_tokens": 21, "completion_tokens": 14}
})json";

}  // namespace

TEST_CASE("http fixture replay parses samples and provider usage") {
  const CompletionResponse resp =
      parse_chat_completion(kFixtureBody, "prompt text", "http:test");
  REQUIRE(resp.samples.size() == 2);
  CHECK(resp.samples[0] == "Answer: (7-5)*2*6");
  CHECK(resp.usage.prompt_tokens == 21);
  CHECK(resp.usage.completion_tokens == 14);
  CHECK(!resp.usage.estimated);
}

TEST_CASE("missing usage falls back to the char/4 estimator, flagged") {
  const char* body = R"({"choices":[{"message":{"content":"abcdefgh"}}]})";
  const CompletionResponse resp = parse_chat_completion(body, "12345678", "b");
  CHECK(resp.usage.estimated);
  CHECK(resp.usage.prompt_tokens == 2);
  CHECK(resp.usage.completion_tokens == 2);
}

TEST_CASE("malformed bodies raise protocol errors") {
  CHECK_THROWS_AS(parse_chat_completion("not json", "p", "b"), BackendError);
  CHECK_THROWS_AS(parse_chat_completion(R"({"choices":[]})", "p", "b"),
                  BackendError);
}

TEST_CASE("429 then 200 retries once and reports it") {
  int calls = 0;
  std::vector<int> sleeps;
  HttpEndpointConfig endpoint;
  endpoint.api_key_env = "";
  HttpBackend backend(
      endpoint, RetryPolicy{3, {10, 20, 40}, 7},
      [&calls](const std::string&, const std::string&,
               const std::string&) -> HttpResult {
        ++calls;
        if (calls == 1) return {429, "slow down", false, ""};
        return {200, kFixtureBody, false, ""};
      },
      [&sleeps](int ms) { sleeps.push_back(ms); });

  CompletionRequest req;
  req.prompt = "p";
  const CompletionResponse resp = backend.complete(req);
  CHECK(calls == 2);
  CHECK(resp.retries == 1);
  CHECK(backend.last_retry_count() == 1);
  CHECK(sleeps.size() == 1);
  CHECK(sleeps[0] >= 10);
}

TEST_CASE("auth failures are refusals and never retried") {
  int calls = 0;
  HttpEndpointConfig endpoint;
  endpoint.api_key_env = "";
  HttpBackend backend(
      endpoint, RetryPolicy{3, {1, 2, 4}, 0},
      [&calls](const std::string&, const std::string&,
               const std::string&) -> HttpResult {
        ++calls;
        return {401, "no", false, ""};
      },
      [](int) {});
  CompletionRequest req;
  req.prompt = "p";
  try {
    backend.complete(req);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::refusal);
  }
  CHECK(calls == 1);
}

TEST_CASE("persistent rate limiting exhausts the retry budget") {
  int calls = 0;
  HttpEndpointConfig endpoint;
  endpoint.api_key_env = "";
  HttpBackend backend(
      endpoint, RetryPolicy{3, {1, 2, 4}, 0},
      [&calls](const std::string&, const std::string&,
               const std::string&) -> HttpResult {
        ++calls;
        return {429, "still busy", false, ""};
      },
      [](int) {});
  CompletionRequest req;
  req.prompt = "p";
  try {
    backend.complete(req);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::rate_limit);
  }
  CHECK(calls == 3);
}

TEST_CASE("cost helpers render and price token counts") {
  CHECK(format_kilo(5500) == "5.5k");
  CHECK(format_kilo(1600) == "1.6k");
  CHECK(format_kilo(0) == "0.0k");
  const PriceTable prices{0.01, 0.03};
  CHECK(usage_cost(1000, 1000, prices) == doctest::Approx(0.04));
  CHECK(usage_cost(0, 0, prices) == 0.0);
}
