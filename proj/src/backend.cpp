#include "t2ot/backend.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace t2ot {

std::uint64_t phase_tag_id(const std::string& tag) {
  if (tag == kPhasePropose) return 1;
  if (tag == kPhaseValue) return 2;
  if (tag == kPhaseVote) return 3;
  if (tag == kPhaseWrite) return 4;
  if (tag == kPhaseJudge) return 5;
  return fnv1a64(tag);
}

// ---- ledger ------------------------------------------------------------------

void UsageLedger::record(const std::string& phase, const TokenUsage& usage) {
  if (usage.prompt_tokens < 0 || usage.completion_tokens < 0) {
    throw std::invalid_argument("UsageLedger: negative token counts");
  }
  PhaseUsage& p = phases_[phase];
  p.prompt_tokens += usage.prompt_tokens;
  p.completion_tokens += usage.completion_tokens;
  p.calls += 1;
  if (usage.estimated) p.estimated_responses += 1;
}

PhaseUsage UsageLedger::total() const {
  PhaseUsage sum;
  for (const auto& [tag, p] : phases_) {
    sum.prompt_tokens += p.prompt_tokens;
    sum.completion_tokens += p.completion_tokens;
    sum.calls += p.calls;
    sum.estimated_responses += p.estimated_responses;
  }
  return sum;
}

nlohmann::json UsageLedger::to_json() const {
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [tag, p] : phases_) {
    phases[tag] = {{"prompt_tokens", p.prompt_tokens},
                   {"completion_tokens", p.completion_tokens},
                   {"calls", p.calls},
                   {"estimated_responses", p.estimated_responses}};
  }
  const PhaseUsage sum = total();
  return {{"phases", phases},
          {"total",
           {{"prompt_tokens", sum.prompt_tokens},
            {"completion_tokens", sum.completion_tokens},
            {"calls", sum.calls},
            {"estimated_responses", sum.estimated_responses}}}};
}

double usage_cost(long long prompt_tokens, long long completion_tokens,
                  const PriceTable& prices) {
  return prompt_tokens / 1000.0 * prices.prompt_per_1k +
         completion_tokens / 1000.0 * prices.completion_per_1k;
}

// ---- backend base --------------------------------------------------------------

CompletionResponse Backend::complete(const CompletionRequest& request) {
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw std::invalid_argument("complete: temperature outside [0, 2]");
  }
  if (request.sample_count < 1) {
    throw std::invalid_argument("complete: sample_count must be >= 1");
  }
  CompletionResponse response = do_complete(request);
  if (ledger_) ledger_->record(request.tag, response.usage);
  return response;
}

// ---- scripted policy -------------------------------------------------------------

const PolicyRule* ScriptedPolicy::match(const std::string& task,
                                        const std::string& phase,
                                        const std::string& prompt) const {
  for (const PolicyRule& rule : rules) {
    if (!rule.task.empty() && rule.task != task) continue;
    if (!rule.phase.empty() && rule.phase != phase) continue;
    if (!rule.key.empty() && prompt.find(rule.key) == std::string::npos)
      continue;
    return &rule;
  }
  return nullptr;
}

ScriptedPolicy ScriptedPolicy::from_json(const nlohmann::json& doc) {
  ScriptedPolicy policy;
  policy.fallback = doc.value("fallback", policy.fallback);
  for (const auto& r : doc.value("rules", nlohmann::json::array())) {
    PolicyRule rule;
    rule.task = r.value("task", "");
    rule.phase = r.value("phase", "");
    rule.key = r.value("key", "");
    for (const auto& c : r.value("candidates", nlohmann::json::array())) {
      PolicyCandidate cand;
      cand.text = c.value("text", "");
      cand.weight = c.value("weight", 1.0);
      rule.candidates.push_back(std::move(cand));
    }
    if (rule.candidates.empty()) {
      throw std::invalid_argument("ScriptedPolicy: rule without candidates");
    }
    policy.rules.push_back(std::move(rule));
  }
  return policy;
}

nlohmann::json ScriptedPolicy::to_json() const {
  nlohmann::json rules_json = nlohmann::json::array();
  for (const PolicyRule& rule : rules) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const PolicyCandidate& c : rule.candidates) {
      candidates.push_back({{"text", c.text}, {"weight", c.weight}});
    }
    rules_json.push_back({{"task", rule.task},
                          {"phase", rule.phase},
                          {"key", rule.key},
                          {"candidates", candidates}});
  }
  return {{"fallback", fallback}, {"rules", rules_json}};
}

std::size_t draw_candidate(const std::vector<PolicyCandidate>& candidates,
                           double temperature, std::uint64_t seed) {
  if (candidates.empty()) {
    throw std::invalid_argument("draw_candidate: no candidates");
  }
  const double scale = 1.0 / std::max(temperature, 1e-3);
  // Max-shifted softmax over weight * scale keeps exp() in range even for
  // near-zero temperatures.
  double max_logit = -1e300;
  std::vector<double> logits(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    logits[i] = candidates[i].weight * scale;
    max_logit = std::max(max_logit, logits[i]);
  }
  double sum = 0.0;
  std::vector<double> probs(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double u = dist(rng) * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return candidates.size() - 1;
}

std::vector<std::string> simulated_sample(const ScriptedPolicy& policy,
                                          const std::string& task,
                                          const CompletionRequest& request,
                                          std::uint64_t seed) {
  std::vector<std::string> samples;
  samples.reserve(static_cast<std::size_t>(request.sample_count));
  const PolicyRule* rule = policy.match(task, request.tag, request.prompt);
  for (int j = 0; j < request.sample_count; ++j) {
    if (!rule) {
      samples.push_back(policy.fallback);
      continue;
    }
    const std::size_t pick =
        draw_candidate(rule->candidates, request.temperature, mix_seed(seed, j));
    samples.push_back(rule->candidates[pick].text);
  }
  return samples;
}

CompletionResponse SimulatedBackend::do_complete(
    const CompletionRequest& request) {
  CompletionResponse response;
  response.samples = simulated_sample(policy_, task_, request, request.seed);
  response.usage.prompt_tokens = estimate_tokens(request.prompt);
  for (const std::string& s : response.samples) {
    response.usage.completion_tokens += estimate_tokens(s);
  }
  response.usage.estimated = false;
  response.backend_id = id();
  response.latency_ms = 0.0;
  return response;
}

}  // namespace t2ot
