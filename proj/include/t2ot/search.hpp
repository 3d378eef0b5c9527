#pragma once

/**
 * Breadth-first beam search over model-generated thoughts, parameterized by
 * a task definition, a backend and a temperature controller. Runs one tree
 * or a lockstep swarm of trees: every tree finishes step s before any tree
 * starts step s+1, and the global best consumed at a step is the maximum of
 * the personal bests from the previous barrier.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2ot/backend.hpp"
#include "t2ot/temperature.hpp"

namespace t2ot {

enum class Method { io, cot, tot, tot_random, t2ot };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

enum class StepScore { max, mean };

struct ThoughtNode {
  int id = 0;
  std::optional<int> parent_id;
  int depth = 0;
  std::string content;
  std::optional<double> value;
  double temperature_used = 0.0;
};

struct SearchConfig {
  int depth_limit = 3;
  int beam_width = 5;
  int value_samples = 3;
  int tree_count = 1;
  Method method = Method::t2ot;
  std::uint64_t seed = 0;
  StepScore step_score = StepScore::max;  // beam aggregation for x
  double random_temp_min = 0.0;           // tot-random draw range (open)
  double random_temp_max = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct Verdict {
  bool success = false;
  std::string answer;
  double score = 0.0;
  bool flagged = false;
};

struct ProposalOutcome {
  std::vector<std::string> children;  // child node contents, line order
  long long dropped = 0;
  std::map<std::string, long long> drop_reasons;
};

struct ValueOutcome {
  double score = 0.0;
  bool fallback = false;
};

/// Pluggable task contract. Parsers are total: arbitrary model output maps
/// to candidates-or-empty (plus drop counts), never an abort.
class Task {
 public:
  virtual ~Task() = default;
  virtual std::string name() const = 0;
  virtual std::string root_content() const = 0;
  virtual bool is_terminal(const std::string& content) const = 0;
  virtual std::string propose_prompt(const std::string& content) const = 0;
  virtual std::string value_prompt(const std::string& content) const = 0;
  virtual ProposalOutcome parse_proposals(const std::string& content,
                                          const std::string& response) const = 0;
  virtual ValueOutcome parse_value(const std::string& response) const = 0;
  virtual std::string io_prompt() const = 0;
  virtual std::string cot_prompt() const = 0;
  virtual Verdict verdict_from_text(const std::string& answer_text) const = 0;
  virtual Verdict verdict_from_nodes(
      const std::vector<ThoughtNode>& final_beam) const = 0;
};

struct SearchResult {
  std::vector<ThoughtNode> nodes;         // all nodes, indexed by id
  std::vector<std::vector<int>> beams;    // per executed step
  std::vector<double> temperatures;       // temperature used per executed step
  std::vector<TemperatureHistoryEntry> history;
  Verdict verdict;
  bool exhausted = false;
  bool incomplete = false;
  std::string failure;
  long long dropped_proposals = 0;
  long long value_fallbacks = 0;
  nlohmann::json transcript;  // {"steps": [...], "verdict": {...}, ...}
};

/// Deterministic request-seed derivation: scheduling can never change draws.
std::uint64_t request_seed(std::uint64_t tree_seed, int node_id,
                           const std::string& phase, int sample_index);

// Transcript building blocks shared by the search engine and the writing
// pipeline, so every run record has the same request/verdict shape.
nlohmann::json transcript_usage_json(const TokenUsage& usage);
nlohmann::json transcript_request_json(const std::string& phase, int node_id,
                                       int sample_index,
                                       const CompletionRequest& request,
                                       const CompletionResponse& response);
nlohmann::json transcript_verdict_json(const Verdict& verdict);

/// Controller for a search method (tot / tot-random / t2ot). Throws for
/// io and cot, which take no controller.
std::unique_ptr<TemperatureController> make_method_controller(
    Method method, const PsoParams& params, const SearchConfig& config,
    std::uint64_t tree_seed);

/// Selects the beam_width highest-valued nodes; ties break on ascending id.
std::vector<int> select_beam(const std::vector<ThoughtNode>& nodes,
                             const std::vector<int>& candidate_ids,
                             int beam_width);

/// One tree with a caller-supplied controller.
SearchResult run_search(Task& task, Backend& backend,
                        TemperatureController& controller,
                        const SearchConfig& config);

/// config.tree_count trees in lockstep; controllers are built from
/// config.method and params (tree i uses seed config.seed + i).
std::vector<SearchResult> run_swarm(Task& task, Backend& backend,
                                    const PsoParams& params,
                                    const SearchConfig& config);

/// Single prompt -> answer at temp_init; no controller involved.
SearchResult run_io_baseline(Task& task, Backend& backend,
                             const SearchConfig& config, double temp_init);

/// Single prompt eliciting stepwise reasoning -> answer at temp_init.
SearchResult run_cot_baseline(Task& task, Backend& backend,
                              const SearchConfig& config, double temp_init);

}  // namespace t2ot
