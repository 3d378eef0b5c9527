#include "t2ot/creative_writing.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "t2ot/util.hpp"

namespace t2ot::cw {

using nlohmann::json;

void WritingConfig::validate() const {
  if (plan_count < 1) throw std::invalid_argument("plan_count must be >= 1");
  if (vote_rounds < 1) throw std::invalid_argument("vote_rounds must be >= 1");
}

// ---- pure parsing -------------------------------------------------------------

namespace {

std::optional<int> parse_int_at(const std::string& s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
    return std::nullopt;
  long long v = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    v = v * 10 + (s[pos] - '0');
    if (v > 1000000) return std::nullopt;
    ++pos;
  }
  return static_cast<int>(v);
}

}  // namespace

std::optional<int> parse_vote(const std::string& text, int plan_count) {
  const std::string lower = to_lower(text);
  std::optional<int> pick;
  if (const std::size_t pos = lower.find("best plan is");
      pos != std::string::npos) {
    pick = parse_int_at(lower, pos + 12);
  }
  if (!pick) {
    if (const std::size_t pos = lower.find("plan"); pos != std::string::npos) {
      pick = parse_int_at(lower, pos + 4);
    }
  }
  if (!pick) {
    const std::string t = trim(lower);
    if (!t.empty() &&
        std::all_of(t.begin(), t.end(),
                    [](unsigned char c) { return std::isdigit(c); })) {
      pick = parse_int_at(t, 0);
    }
  }
  if (!pick || *pick < 1 || *pick > plan_count) return std::nullopt;
  return *pick - 1;
}

CoherencyScore parse_coherency(const std::string& judge_text) {
  CoherencyScore score;
  score.raw = judge_text;
  const std::string lower = to_lower(judge_text);
  const std::string sentinel = "coherency score is";
  const std::size_t pos = lower.rfind(sentinel);
  if (pos == std::string::npos) {
    score.fallback = true;
    score.value = 50;
    return score;
  }
  const auto parsed = parse_int_at(lower, pos + sentinel.size());
  if (!parsed) {
    score.fallback = true;
    score.value = 50;
    return score;
  }
  int v = *parsed;
  if (v > 100) {
    v = 100;
    score.clamped = true;
  }
  score.value = v;
  return score;
}

namespace {

// Strips trailing whitespace and at most one trailing punctuation mark.
std::string normalize_ending(const std::string& s) {
  std::string out = s;
  auto rtrim = [&out]() {
    while (!out.empty() &&
           std::isspace(static_cast<unsigned char>(out.back()))) {
      out.pop_back();
    }
  };
  rtrim();
  if (!out.empty()) {
    const char c = out.back();
    if (c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':') {
      out.pop_back();
    }
  }
  rtrim();
  return out;
}

bool ends_with(const std::string& text, const std::string& suffix) {
  if (suffix.size() > text.size()) return false;
  return text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

bool validate_passage(const std::string& passage,
                      const WritingInstance& instance,
                      std::array<bool, 4>* flags) {
  const std::vector<std::string> paragraphs = split_blank_separated(passage);
  std::array<bool, 4> local{false, false, false, false};
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= paragraphs.size()) continue;
    // Paragraph text is re-joined without line breaks before matching so a
    // wrapped ending sentence still counts.
    std::string flat;
    for (const std::string& line : split_lines(paragraphs[i])) {
      if (!flat.empty()) flat += ' ';
      flat += trim(line);
    }
    local[i] = ends_with(normalize_ending(flat),
                         normalize_ending(instance.sentences[i]));
  }
  if (flags) *flags = local;
  return paragraphs.size() == 4 && local[0] && local[1] && local[2] && local[3];
}

// ---- prompts --------------------------------------------------------------------

namespace {

std::string sentences_block(const WritingInstance& instance) {
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    out += std::to_string(i + 1) + ". " + instance.sentences[i] + "\n";
  }
  return out;
}

}  // namespace

std::string plan_prompt(const WritingInstance& instance) {
  return "Plan a coherent passage of 4 short paragraphs. Paragraph i must "
         "end with the given sentence i.\nEnding sentences:\n" +
         sentences_block(instance) +
         "Write a brief numbered plan, one line per paragraph.";
}

std::string passage_prompt(const WritingInstance& instance,
                           const std::string& plan) {
  return "Write a coherent passage of exactly 4 paragraphs separated by "
         "blank lines. Paragraph i must end with the given sentence i, "
         "verbatim.\nEnding sentences:\n" +
         sentences_block(instance) + "Follow this plan:\n" + plan +
         "\nPassage:";
}

std::string vote_prompt(const WritingInstance& instance,
                        const std::vector<std::string>& candidates) {
  std::string out =
      "Given the ending sentences:\n" + sentences_block(instance) +
      "choose the most promising candidate below.\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += "\nPlan " + std::to_string(i + 1) + ":\n" + candidates[i] + "\n";
  }
  out += "\nReply with exactly: best plan is N";
  return out;
}

std::string judge_prompt(const std::string& passage,
                         const WritingConfig& config) {
  std::string out =
      "Analyze the following passage in detail. Consider the clarity, "
      "structure, argument coherence, and style of the writing.";
  if (!config.judge_body.empty()) out += " " + config.judge_body;
  out += "\n\nPassage:\n" + passage + "\n\n";
  out +=
      "Conclude with: 'Thus, the coherency score is {s}', where s is an "
      "integer from 0 to 100, aiming for a normal distribution of scores "
      "with an average of 50.";
  return out;
}

std::string writing_io_prompt(const WritingInstance& instance) {
  return "Write a coherent passage of exactly 4 paragraphs separated by "
         "blank lines. Paragraph i must end with the given sentence i, "
         "verbatim.\nEnding sentences:\n" +
         sentences_block(instance) + "Passage:";
}

std::string writing_cot_prompt(const WritingInstance& instance) {
  return "First sketch a brief plan, then write a coherent passage of "
         "exactly 4 paragraphs separated by blank lines. Paragraph i must "
         "end with the given sentence i, verbatim.\nEnding sentences:\n" +
         sentences_block(instance) +
         "Give the plan, then a line reading 'Passage:', then the passage.";
}

// ---- backend-driven operations ------------------------------------------------------

namespace {

CompletionResponse call(StepContext& ctx, const std::string& tag,
                        const std::string& prompt, int sample_index) {
  CompletionRequest req;
  req.prompt = prompt;
  req.temperature = ctx.temperature;
  req.sample_count = 1;
  req.tag = tag;
  req.seed = request_seed(ctx.tree_seed, ctx.node_id, tag, sample_index);
  const CompletionResponse resp = ctx.backend.complete(req);
  if (ctx.requests) {
    ctx.requests->push_back(
        transcript_request_json(tag, ctx.node_id, sample_index, req, resp));
  }
  return resp;
}

}  // namespace

std::vector<std::string> generate_plans(const WritingInstance& instance,
                                        StepContext& ctx, int count) {
  if (count < 1) throw std::invalid_argument("generate_plans: count >= 1");
  std::vector<std::string> plans;
  plans.reserve(static_cast<std::size_t>(count));
  const std::string prompt = plan_prompt(instance);
  for (int j = 0; j < count; ++j) {
    plans.push_back(call(ctx, kPhasePropose, prompt, j).samples.at(0));
  }
  return plans;
}

std::vector<std::string> generate_passages(const WritingInstance& instance,
                                           const std::string& plan,
                                           StepContext& ctx, int count) {
  if (count < 1) throw std::invalid_argument("generate_passages: count >= 1");
  std::vector<std::string> passages;
  passages.reserve(static_cast<std::size_t>(count));
  const std::string prompt = passage_prompt(instance, plan);
  for (int j = 0; j < count; ++j) {
    passages.push_back(call(ctx, kPhaseWrite, prompt, j).samples.at(0));
  }
  return passages;
}

VoteTally vote_plans(const std::vector<std::string>& candidates,
                     const WritingInstance& instance, StepContext& ctx,
                     int rounds) {
  if (rounds < 1) throw std::invalid_argument("vote_plans: rounds >= 1");
  VoteTally tally;
  tally.votes.assign(candidates.size(), 0);
  const std::string prompt = vote_prompt(instance, candidates);
  for (int r = 0; r < rounds; ++r) {
    const std::string reply = call(ctx, kPhaseVote, prompt, r).samples.at(0);
    const auto pick = parse_vote(reply, static_cast<int>(candidates.size()));
    if (pick) {
      tally.votes[static_cast<std::size_t>(*pick)] += 1;
    } else {
      tally.discarded += 1;
    }
  }
  int best = 0;
  for (std::size_t i = 1; i < tally.votes.size(); ++i) {
    if (tally.votes[i] > tally.votes[best]) best = static_cast<int>(i);
  }
  tally.winner = best;
  if (tally.discarded == rounds) {
    tally.winner = 0;
    tally.fallback_winner = true;
  }
  return tally;
}

CoherencyScore score_coherency(const std::string& passage, StepContext& ctx,
                               const WritingConfig& config,
                               int judge_sample_index) {
  const std::string reply =
      call(ctx, kPhaseJudge, judge_prompt(passage, config), judge_sample_index)
          .samples.at(0);
  return parse_coherency(reply);
}

double score_plan_step(const std::vector<std::string>& plans, int winner,
                       StepContext& ctx, const WritingConfig& config,
                       std::vector<CoherencyScore>* details) {
  if (plans.empty()) throw std::invalid_argument("score_plan_step: no plans");
  if (!config.score_all_plans) {
    const CoherencyScore s =
        score_coherency(plans.at(static_cast<std::size_t>(winner)), ctx, config, 0);
    if (details) details->push_back(s);
    return static_cast<double>(s.value);
  }
  double best = 0.0;
  for (std::size_t j = 0; j < plans.size(); ++j) {
    const CoherencyScore s =
        score_coherency(plans[j], ctx, config, static_cast<int>(j));
    if (details) details->push_back(s);
    best = std::max(best, static_cast<double>(s.value));
  }
  return best;
}

// ---- runners ---------------------------------------------------------------------------

namespace {

struct PipelineRun {
  int index = 0;
  std::uint64_t seed = 0;
  TemperatureController* controller = nullptr;
  double temperature = 0.0;
  json steps = json::array();
  std::vector<double> temperatures;
  std::vector<std::string> plans;
  int plan_winner = 0;
  bool incomplete = false;
  std::string failure;
  long long vote_discards = 0;
  long long judge_fallbacks = 0;
  long long judge_clamps = 0;
  Verdict verdict;
};

json tally_json(const VoteTally& tally) {
  return {{"tally", tally.votes},
          {"winner", tally.winner},
          {"discarded", tally.discarded},
          {"fallback_winner", tally.fallback_winner}};
}

json judge_json(const CoherencyScore& s) {
  return {{"score", s.value}, {"fallback", s.fallback}, {"clamped", s.clamped}};
}

void track_judge(PipelineRun& run, const CoherencyScore& s) {
  if (s.fallback) run.judge_fallbacks += 1;
  if (s.clamped) run.judge_clamps += 1;
}

// Plan step; returns x (the judged plan score).
double writing_step_one(const WritingInstance& instance, Backend& backend,
                        const WritingConfig& writing, PipelineRun& run) {
  json requests = json::array();
  StepContext ctx{backend, run.seed, 0, run.temperature, &requests};

  run.plans = generate_plans(instance, ctx, writing.plan_count);
  const VoteTally tally = vote_plans(run.plans, instance, ctx, writing.vote_rounds);
  run.vote_discards += tally.discarded;
  run.plan_winner = tally.winner;

  std::vector<CoherencyScore> details;
  const double x =
      score_plan_step(run.plans, tally.winner, ctx, writing, &details);
  json judges = json::array();
  for (const CoherencyScore& s : details) {
    track_judge(run, s);
    judges.push_back(judge_json(s));
  }

  run.temperatures.push_back(run.temperature);
  run.steps.push_back({{"step", 1},
                       {"temperature", run.temperature},
                       {"requests", std::move(requests)},
                       {"plans", run.plans},
                       {"votes", tally_json(tally)},
                       {"judges", std::move(judges)},
                       {"x", x}});
  return x;
}

// Write step; returns x (the final coherency score).
double writing_step_two(const WritingInstance& instance, Backend& backend,
                        const WritingConfig& writing, PipelineRun& run) {
  json requests = json::array();
  StepContext ctx{backend, run.seed, 1, run.temperature, &requests};

  const std::string& plan =
      run.plans.at(static_cast<std::size_t>(run.plan_winner));
  const std::vector<std::string> passages =
      generate_passages(instance, plan, ctx, writing.plan_count);
  const VoteTally tally = vote_plans(passages, instance, ctx, writing.vote_rounds);
  run.vote_discards += tally.discarded;

  const std::string& passage =
      passages.at(static_cast<std::size_t>(tally.winner));
  const CoherencyScore final_score = score_coherency(passage, ctx, writing, 0);
  track_judge(run, final_score);

  std::array<bool, 4> flags{};
  const bool ok = validate_passage(passage, instance, &flags);

  run.verdict.success = ok;
  run.verdict.answer = passage;
  run.verdict.score = static_cast<double>(final_score.value);
  run.verdict.flagged = tally.fallback_winner || final_score.fallback;

  run.temperatures.push_back(run.temperature);
  run.steps.push_back({{"step", 2},
                       {"temperature", run.temperature},
                       {"requests", std::move(requests)},
                       {"passages", passages},
                       {"votes", tally_json(tally)},
                       {"judges", json::array({judge_json(final_score)})},
                       {"validation", {{"ok", ok}, {"flags", flags}}},
                       {"x", static_cast<double>(final_score.value)}});
  return static_cast<double>(final_score.value);
}

WritingResult finish_pipeline(PipelineRun& run) {
  WritingResult result;
  result.temperatures = std::move(run.temperatures);
  if (run.controller) result.history = run.controller->state().history;
  result.verdict = run.verdict;
  result.incomplete = run.incomplete;
  result.failure = run.failure;
  result.vote_discards = run.vote_discards;
  result.judge_fallbacks = run.judge_fallbacks;
  result.judge_clamps = run.judge_clamps;
  result.transcript = {{"tree", run.index},
                       {"steps", std::move(run.steps)},
                       {"verdict", transcript_verdict_json(result.verdict)},
                       {"exhausted", false},
                       {"incomplete", result.incomplete},
                       {"vote_discards", result.vote_discards},
                       {"judge_fallbacks", result.judge_fallbacks},
                       {"judge_clamps", result.judge_clamps}};
  if (!result.failure.empty()) result.transcript["failure"] = result.failure;
  return result;
}

}  // namespace

std::vector<WritingResult> run_writing_swarm(const WritingInstance& instance,
                                             Backend& backend,
                                             const PsoParams& params,
                                             const SearchConfig& config,
                                             const WritingConfig& writing) {
  config.validate();
  writing.validate();
  if (config.method == Method::io || config.method == Method::cot) {
    throw std::invalid_argument("run_writing_swarm: io/cot use the baselines");
  }
  if (config.depth_limit != 2) {
    throw std::invalid_argument("creative writing runs exactly 2 steps");
  }

  std::vector<std::unique_ptr<TemperatureController>> controllers;
  std::vector<PipelineRun> runs(static_cast<std::size_t>(config.tree_count));
  for (int i = 0; i < config.tree_count; ++i) {
    const std::uint64_t tree_seed = config.seed + static_cast<std::uint64_t>(i);
    controllers.push_back(
        make_method_controller(config.method, params, config, tree_seed));
    runs[i].index = i;
    runs[i].seed = tree_seed;
    runs[i].controller = controllers.back().get();
    runs[i].temperature = runs[i].controller->initial_temperature();
  }

  SwarmState swarm;
  for (int step = 1; step <= 2; ++step) {
    std::vector<std::optional<double>> step_scores(runs.size());
    for (PipelineRun& run : runs) {
      if (run.incomplete) continue;
      try {
        step_scores[run.index] =
            step == 1 ? writing_step_one(instance, backend, writing, run)
                      : writing_step_two(instance, backend, writing, run);
      } catch (const BackendError& e) {
        run.incomplete = true;
        run.failure = e.what();
      }
    }
    // Same barrier contract as the search engine.
    for (PipelineRun& run : runs) {
      if (!step_scores[run.index]) continue;
      const double x = *step_scores[run.index];
      const double gb = swarm.global_best.value_or(x);
      const double next = run.controller->advance(x, gb);
      run.steps.back()["pb"] = run.controller->state().history.back().pb;
      run.steps.back()["gb"] = gb;
      run.steps.back()["next_temperature"] = next;
      run.temperature = next;
    }
    swarm.personal_bests.clear();
    for (PipelineRun& run : runs) {
      const auto& pb = run.controller->state().personal_best;
      if (pb) swarm.personal_bests.push_back(*pb);
    }
    if (!swarm.personal_bests.empty()) update_global_best(swarm);
  }

  std::vector<WritingResult> results;
  results.reserve(runs.size());
  for (PipelineRun& run : runs) results.push_back(finish_pipeline(run));
  return results;
}

namespace {

WritingResult run_writing_single(const WritingInstance& instance,
                                 Backend& backend, const SearchConfig& config,
                                 const WritingConfig& writing, double temp_init,
                                 const std::string& prompt) {
  PipelineRun run;
  run.seed = config.seed;
  run.temperature = temp_init;
  json requests = json::array();
  try {
    StepContext ctx{backend, run.seed, 0, temp_init, &requests};
    std::string passage = call(ctx, kPhaseWrite, prompt, 0).samples.at(0);
    // CoT replies may carry the plan first; the passage follows the marker.
    if (const std::size_t pos = passage.find("Passage:");
        pos != std::string::npos) {
      passage = trim(passage.substr(pos + 8));
    }
    const CoherencyScore final_score = score_coherency(passage, ctx, writing, 0);
    track_judge(run, final_score);

    std::array<bool, 4> flags{};
    const bool ok = validate_passage(passage, instance, &flags);
    run.verdict.success = ok;
    run.verdict.answer = passage;
    run.verdict.score = static_cast<double>(final_score.value);
    run.verdict.flagged = final_score.fallback;

    run.temperatures.push_back(temp_init);
    run.steps.push_back({{"step", 1},
                         {"temperature", temp_init},
                         {"requests", std::move(requests)},
                         {"judges", json::array({judge_json(final_score)})},
                         {"validation", {{"ok", ok}, {"flags", flags}}},
                         {"x", static_cast<double>(final_score.value)}});
  } catch (const BackendError& e) {
    run.incomplete = true;
    run.failure = e.what();
    run.steps.push_back({{"step", 1},
                         {"temperature", temp_init},
                         {"requests", std::move(requests)}});
  }
  return finish_pipeline(run);
}

}  // namespace

WritingResult run_writing_io(const WritingInstance& instance, Backend& backend,
                             const SearchConfig& config,
                             const WritingConfig& writing, double temp_init) {
  return run_writing_single(instance, backend, config, writing, temp_init,
                            writing_io_prompt(instance));
}

WritingResult run_writing_cot(const WritingInstance& instance, Backend& backend,
                              const SearchConfig& config,
                              const WritingConfig& writing, double temp_init) {
  return run_writing_single(instance, backend, config, writing, temp_init,
                            writing_cot_prompt(instance));
}

// ---- instance files -----------------------------------------------------------------------

std::vector<WritingInstance> parse_writing_instances(const std::string& text) {
  std::vector<WritingInstance> out;
  for (const std::string& block : split_blank_separated(text)) {
    const std::vector<std::string> lines = split_lines(block);
    if (lines.size() != 4) {
      throw std::runtime_error(
          "writing dataset: each instance needs exactly 4 sentence lines");
    }
    WritingInstance inst;
    inst.id = static_cast<int>(out.size());
    for (std::size_t i = 0; i < 4; ++i) {
      inst.sentences[i] = trim(lines[i]);
      if (inst.sentences[i].empty()) {
        throw std::runtime_error("writing dataset: empty sentence line");
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<WritingInstance> load_writing_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_writing_instances(buf.str());
}

std::vector<WritingInstance> generate_writing_instances(int count,
                                                        std::uint64_t seed) {
  static const char* kSubjects[] = {"the lighthouse", "a cartographer",
                                    "the night train", "an old violin",
                                    "the tide",        "a borrowed coat",
                                    "the observatory", "a paper boat"};
  static const char* kVerbs[] = {"remembered", "outlasted", "sheltered",
                                 "unsettled",  "carried",   "ignored"};
  static const char* kObjects[] = {"the storm",      "every letter",
                                   "the first frost", "its own echo",
                                   "the harvest",     "the city lights"};
  std::mt19937_64 rng(seed);
  const auto pick = [&rng](auto& arr) {
    std::uniform_int_distribution<std::size_t> d(0, std::size(arr) - 1);
    return std::string(arr[d(rng)]);
  };
  std::vector<WritingInstance> out;
  for (int i = 0; i < count; ++i) {
    WritingInstance inst;
    inst.id = i;
    for (std::size_t s = 0; s < 4; ++s) {
      std::string sentence =
          pick(kSubjects) + " " + pick(kVerbs) + " " + pick(kObjects) + ".";
      sentence[0] = static_cast<char>(
          std::toupper(static_cast<unsigned char>(sentence[0])));
      inst.sentences[s] = sentence;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::string writing_instances_text(const std::vector<WritingInstance>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += "\n";
    for (const std::string& s : list[i].sentences) {
      out += s;
      out += '\n';
    }
  }
  return out;
}

}  // namespace t2ot::cw
