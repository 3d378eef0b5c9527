#pragma once

/**
 * Model-access layer: a common completion contract, a deterministic
 * temperature-sensitive scripted model for tests and offline experiments,
 * and token/cost accounting.
 *
 * Every request carries a caller-derived seed. The scripted backend draws
 * sample j of a request with mix_seed(request.seed, j), so results depend
 * only on seeds, never on call order or thread scheduling.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2ot/util.hpp"

namespace t2ot {

// Phase tags used for ledger partitioning and seed derivation.
inline constexpr const char* kPhasePropose = "propose";
inline constexpr const char* kPhaseValue = "value";
inline constexpr const char* kPhaseVote = "vote";
inline constexpr const char* kPhaseWrite = "write";
inline constexpr const char* kPhaseJudge = "judge";

std::uint64_t phase_tag_id(const std::string& tag);

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.7;
  int sample_count = 1;
  int max_output = 1024;
  std::vector<std::string> stop;
  std::string tag = kPhasePropose;
  std::uint64_t seed = 0;
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  bool estimated = false;  // true when counts come from the char/4 fallback
};

struct CompletionResponse {
  std::vector<std::string> samples;
  TokenUsage usage;
  std::string backend_id;
  double latency_ms = 0.0;  // scripted backend always reports 0
  int retries = 0;
};

enum class BackendErrorKind { timeout, rate_limit, protocol, refusal };

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  BackendErrorKind kind() const { return kind_; }

 private:
  BackendErrorKind kind_;
};

// ---- usage accounting -------------------------------------------------------

struct PhaseUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  long long calls = 0;
  long long estimated_responses = 0;
};

/// Serialized sink for usage events; one ledger per run.
class UsageLedger {
 public:
  void record(const std::string& phase, const TokenUsage& usage);
  const std::map<std::string, PhaseUsage>& phases() const { return phases_; }
  PhaseUsage total() const;
  nlohmann::json to_json() const;

 private:
  std::map<std::string, PhaseUsage> phases_;
};

struct PriceTable {
  double prompt_per_1k = 0.01;
  double completion_per_1k = 0.03;
};

double usage_cost(long long prompt_tokens, long long completion_tokens,
                  const PriceTable& prices);

// ---- backend contract -------------------------------------------------------

class Backend {
 public:
  virtual ~Backend() = default;

  /// Validates the request, dispatches it, and records usage to the attached
  /// ledger. Throws BackendError when the transport gives up.
  CompletionResponse complete(const CompletionRequest& request);

  virtual std::string id() const = 0;

  void attach_ledger(UsageLedger* ledger) { ledger_ = ledger; }

 protected:
  virtual CompletionResponse do_complete(const CompletionRequest& request) = 0;

 private:
  UsageLedger* ledger_ = nullptr;
};

// ---- scripted policy ----------------------------------------------------------

struct PolicyCandidate {
  std::string text;
  double weight = 1.0;
};

/// Rule match: task and phase must equal when non-empty; key must occur as a
/// substring of the prompt when non-empty. First matching rule wins.
struct PolicyRule {
  std::string task;
  std::string phase;
  std::string key;
  std::vector<PolicyCandidate> candidates;
};

struct ScriptedPolicy {
  std::vector<PolicyRule> rules;
  std::string fallback = "no scripted response";

  const PolicyRule* match(const std::string& task, const std::string& phase,
                          const std::string& prompt) const;

  static ScriptedPolicy from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// One seeded draw from a rule's candidates: softmax over base weights scaled
/// by 1/max(temperature, 1e-3). temperature -> 0 degenerates to the argmax.
std::size_t draw_candidate(const std::vector<PolicyCandidate>& candidates,
                           double temperature, std::uint64_t seed);

/// All samples for one request (sample j seeded with mix_seed(seed, j)).
std::vector<std::string> simulated_sample(const ScriptedPolicy& policy,
                                          const std::string& task,
                                          const CompletionRequest& request,
                                          std::uint64_t seed);

class SimulatedBackend final : public Backend {
 public:
  SimulatedBackend(ScriptedPolicy policy, std::string task_name)
      : policy_(std::move(policy)), task_(std::move(task_name)) {}

  std::string id() const override { return "simulated"; }
  const ScriptedPolicy& policy() const { return policy_; }

 protected:
  CompletionResponse do_complete(const CompletionRequest& request) override;

 private:
  ScriptedPolicy policy_;
  std::string task_;
};

}  // namespace t2ot
