#pragma once

/**
 * Creative Writing task pipeline. Two reasoning steps per run:
 *
 *   step 1: generate plan candidates, run voting rounds, judge the winner
 *           on the 0-100 coherency scale -> x for the controller update
 *   step 2: generate passages from the winning plan at the adjusted
 *           temperature, vote again, judge the winning passage
 *
 * The judge prompt head and the sentinel phrase
 * "Thus, the coherency score is {s}" are fixed; the middle of the prompt is
 * configurable. x stays on the raw 0-100 scale, which is what the default
 * coefficients (-0.005) are sized against.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2ot/backend.hpp"
#include "t2ot/search.hpp"
#include "t2ot/temperature.hpp"

namespace t2ot::cw {

struct WritingInstance {
  std::array<std::string, 4> sentences;
  int id = 0;
};

struct WritingConfig {
  int plan_count = 5;
  int vote_rounds = 5;
  // x from the winning plan only (default) or the max over all judged plans.
  bool score_all_plans = false;
  std::string judge_body =
      "Weigh how smoothly each paragraph arrives at its required ending "
      "sentence.";

  void validate() const;
};

// ---- pure parsing / validation ---------------------------------------------

/// Accepts "best plan is {i}", "plan {i}" or a bare integer (case-insensitive,
/// 1-based). Anything else, or an out-of-range index, is nullopt.
std::optional<int> parse_vote(const std::string& text, int plan_count);

struct CoherencyScore {
  int value = 50;
  std::string raw;
  bool fallback = false;  // sentinel absent, defaulted to the scale midpoint
  bool clamped = false;
};

/// Extracts s from the last "coherency score is {s}" occurrence and clamps
/// to [0, 100]. Absent sentinel falls back to 50 (flagged).
CoherencyScore parse_coherency(const std::string& judge_text);

/// True iff the passage has exactly 4 blank-line-separated paragraphs and
/// paragraph i ends with sentence i (trailing whitespace and one trailing
/// punctuation mark are normalized away on both sides).
bool validate_passage(const std::string& passage, const WritingInstance& instance,
                      std::array<bool, 4>* flags = nullptr);

// ---- prompts -----------------------------------------------------------------

std::string plan_prompt(const WritingInstance& instance);
std::string passage_prompt(const WritingInstance& instance,
                           const std::string& plan);
std::string vote_prompt(const WritingInstance& instance,
                        const std::vector<std::string>& candidates);
std::string judge_prompt(const std::string& passage,
                         const WritingConfig& config);
std::string writing_io_prompt(const WritingInstance& instance);
std::string writing_cot_prompt(const WritingInstance& instance);

// ---- backend-driven operations --------------------------------------------------

/// Seed/log context for one pipeline step (plan step: node 0; write step:
/// node 1). Requests are appended to *requests when non-null.
struct StepContext {
  Backend& backend;
  std::uint64_t tree_seed = 0;
  int node_id = 0;
  double temperature = 0.7;
  nlohmann::json* requests = nullptr;
};

std::vector<std::string> generate_plans(const WritingInstance& instance,
                                        StepContext& ctx, int count);

std::vector<std::string> generate_passages(const WritingInstance& instance,
                                           const std::string& plan,
                                           StepContext& ctx, int count);

struct VoteTally {
  int winner = 0;
  std::vector<int> votes;
  long long discarded = 0;
  bool fallback_winner = false;  // every round discarded -> plan 0
};

/// rounds voting calls; plurality wins, ties break on the lowest index.
VoteTally vote_plans(const std::vector<std::string>& candidates,
                     const WritingInstance& instance, StepContext& ctx,
                     int rounds);

CoherencyScore score_coherency(const std::string& passage, StepContext& ctx,
                               const WritingConfig& config,
                               int judge_sample_index = 0);

/// x for the controller update after the plan step.
double score_plan_step(const std::vector<std::string>& plans, int winner,
                       StepContext& ctx, const WritingConfig& config,
                       std::vector<CoherencyScore>* details = nullptr);

// ---- runners ----------------------------------------------------------------------

struct WritingResult {
  std::vector<double> temperatures;  // per executed step
  std::vector<TemperatureHistoryEntry> history;
  Verdict verdict;  // success = constraints met, score = final coherency
  bool incomplete = false;
  std::string failure;
  long long vote_discards = 0;
  long long judge_fallbacks = 0;
  long long judge_clamps = 0;
  nlohmann::json transcript;
};

/// config.tree_count pipelines in lockstep with shared global best; the
/// controller comes from config.method (tot / tot-random / t2ot).
std::vector<WritingResult> run_writing_swarm(const WritingInstance& instance,
                                             Backend& backend,
                                             const PsoParams& params,
                                             const SearchConfig& config,
                                             const WritingConfig& writing);

WritingResult run_writing_io(const WritingInstance& instance, Backend& backend,
                             const SearchConfig& config,
                             const WritingConfig& writing, double temp_init);

WritingResult run_writing_cot(const WritingInstance& instance, Backend& backend,
                              const SearchConfig& config,
                              const WritingConfig& writing, double temp_init);

// ---- instance files ------------------------------------------------------------------

/// Groups of 4 nonempty lines separated by blank lines.
std::vector<WritingInstance> load_writing_instances(const std::string& path);
std::vector<WritingInstance> parse_writing_instances(const std::string& text);

/// Seeded placeholder instances for offline experiments.
std::vector<WritingInstance> generate_writing_instances(int count,
                                                        std::uint64_t seed);

std::string writing_instances_text(const std::vector<WritingInstance>& list);

}  // namespace t2ot::cw
