#include "t2ot/search.hpp"

#include <algorithm>
#include <stdexcept>

namespace t2ot {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::io: return "io";
    case Method::cot: return "cot";
    case Method::tot: return "tot";
    case Method::tot_random: return "tot-random";
    case Method::t2ot: return "t2ot";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "io") return Method::io;
  if (name == "cot") return Method::cot;
  if (name == "tot") return Method::tot;
  if (name == "tot-random") return Method::tot_random;
  if (name == "t2ot") return Method::t2ot;
  return std::nullopt;
}

void SearchConfig::validate() const {
  if (depth_limit < 1) throw std::invalid_argument("depth_limit must be >= 1");
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  if (value_samples < 1)
    throw std::invalid_argument("value_samples must be >= 1");
  if (tree_count < 1) throw std::invalid_argument("tree_count must be >= 1");
  if (method == Method::tot_random && !(random_temp_min < random_temp_max)) {
    throw std::invalid_argument("tot-random needs random_temp_min < random_temp_max");
  }
}

std::uint64_t request_seed(std::uint64_t tree_seed, int node_id,
                           const std::string& phase, int sample_index) {
  return mix_seed(tree_seed, static_cast<std::uint64_t>(node_id),
                  phase_tag_id(phase), static_cast<std::uint64_t>(sample_index));
}

std::vector<int> select_beam(const std::vector<ThoughtNode>& nodes,
                             const std::vector<int>& candidate_ids,
                             int beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  std::vector<int> sorted = candidate_ids;
  std::sort(sorted.begin(), sorted.end(), [&nodes](int a, int b) {
    const double va = nodes[a].value.value_or(0.0);
    const double vb = nodes[b].value.value_or(0.0);
    if (va != vb) return va > vb;
    return a < b;
  });
  if (static_cast<int>(sorted.size()) > beam_width) {
    sorted.resize(static_cast<std::size_t>(beam_width));
  }
  return sorted;
}

json transcript_usage_json(const TokenUsage& usage) {
  return {{"prompt_tokens", usage.prompt_tokens},
          {"completion_tokens", usage.completion_tokens},
          {"estimated", usage.estimated}};
}

json transcript_request_json(const std::string& phase, int node_id,
                             int sample_index, const CompletionRequest& request,
                             const CompletionResponse& response) {
  return {{"phase", phase},
          {"node", node_id},
          {"sample", sample_index},
          {"seed", request.seed},
          {"temperature", request.temperature},
          {"prompt", request.prompt},
          {"samples", response.samples},
          {"usage", transcript_usage_json(response.usage)}};
}

json transcript_verdict_json(const Verdict& verdict) {
  return {{"success", verdict.success},
          {"answer", verdict.answer},
          {"score", verdict.score},
          {"flagged", verdict.flagged}};
}

namespace {

json node_json(const ThoughtNode& node, bool carried) {
  json j = {{"id", node.id},
            {"content", node.content},
            {"depth", node.depth},
            {"carried", carried}};
  if (node.parent_id) j["parent"] = *node.parent_id;
  if (node.value) j["value"] = *node.value;
  return j;
}

// Per-tree state for the lockstep loop.
struct TreeRun {
  int index = 0;
  std::uint64_t seed = 0;
  TemperatureController* controller = nullptr;
  double temperature = 0.0;
  std::vector<ThoughtNode> nodes;
  std::vector<int> beam;
  std::vector<std::vector<int>> beams;
  std::vector<double> temperatures;
  json steps = json::array();
  bool exhausted = false;
  bool incomplete = false;
  std::string failure;
  long long dropped_proposals = 0;
  long long value_fallbacks = 0;
  Verdict verdict;

  bool active() const { return !exhausted && !incomplete; }
};

// One expand/evaluate/select round at the tree's current temperature.
// Returns the step score x (max or mean over the selected beam).
std::optional<double> execute_step(Task& task, Backend& backend,
                                   const SearchConfig& config, TreeRun& tree,
                                   int step) {
  json requests = json::array();
  json candidates = json::array();
  std::vector<int> candidate_ids;
  long long dropped_this_step = 0;
  json drop_reasons = json::object();
  long long fallbacks_this_step = 0;

  // Expand. Terminal beam nodes carry over unexpanded and keep their value.
  for (int parent_id : tree.beam) {
    const ThoughtNode& parent = tree.nodes[parent_id];
    if (task.is_terminal(parent.content)) {
      candidate_ids.push_back(parent_id);
      candidates.push_back(node_json(parent, true));
      continue;
    }
    CompletionRequest req;
    req.prompt = task.propose_prompt(parent.content);
    req.temperature = tree.temperature;
    req.sample_count = 1;
    req.tag = kPhasePropose;
    req.seed = request_seed(tree.seed, parent_id, kPhasePropose, 0);
    const CompletionResponse resp = backend.complete(req);
    requests.push_back(
        transcript_request_json(kPhasePropose, parent_id, 0, req, resp));

    const ProposalOutcome parsed =
        task.parse_proposals(parent.content, resp.samples.at(0));
    dropped_this_step += parsed.dropped;
    for (const auto& [reason, count] : parsed.drop_reasons) {
      drop_reasons[reason] = drop_reasons.value(reason, 0LL) + count;
    }
    for (const std::string& child_content : parsed.children) {
      ThoughtNode child;
      child.id = static_cast<int>(tree.nodes.size());
      child.parent_id = parent_id;
      child.depth = parent.depth + 1;
      child.content = child_content;
      child.temperature_used = tree.temperature;
      tree.nodes.push_back(child);
      candidate_ids.push_back(child.id);
    }
  }

  // Evaluate newly created candidates: x = mean of value_samples mapped draws.
  for (int id : candidate_ids) {
    ThoughtNode& node = tree.nodes[id];
    if (node.value) continue;  // carried-over terminal node
    double sum = 0.0;
    for (int s = 0; s < config.value_samples; ++s) {
      CompletionRequest req;
      req.prompt = task.value_prompt(node.content);
      req.temperature = tree.temperature;
      req.sample_count = 1;
      req.tag = kPhaseValue;
      req.seed = request_seed(tree.seed, id, kPhaseValue, s);
      const CompletionResponse resp = backend.complete(req);
      requests.push_back(transcript_request_json(kPhaseValue, id, s, req, resp));
      const ValueOutcome out = task.parse_value(resp.samples.at(0));
      sum += out.score;
      if (out.fallback) fallbacks_this_step += 1;
    }
    node.value = sum / config.value_samples;
    candidates.push_back(node_json(node, false));
  }

  tree.dropped_proposals += dropped_this_step;
  tree.value_fallbacks += fallbacks_this_step;

  const std::vector<int> beam =
      select_beam(tree.nodes, candidate_ids, config.beam_width);

  json step_entry = {{"step", step},
                     {"temperature", tree.temperature},
                     {"requests", requests},
                     {"candidates", candidates},
                     {"dropped", dropped_this_step},
                     {"drop_reasons", drop_reasons},
                     {"value_fallbacks", fallbacks_this_step},
                     {"beam", beam}};

  if (beam.empty()) {
    tree.exhausted = true;
    step_entry["exhausted"] = true;
    tree.steps.push_back(std::move(step_entry));
    return std::nullopt;
  }

  tree.beam = beam;
  tree.beams.push_back(beam);
  tree.temperatures.push_back(tree.temperature);

  double x = 0.0;
  if (config.step_score == StepScore::max) {
    for (int id : beam) x = std::max(x, tree.nodes[id].value.value_or(0.0));
  } else {
    for (int id : beam) x += tree.nodes[id].value.value_or(0.0);
    x /= static_cast<double>(beam.size());
  }
  step_entry["x"] = x;
  tree.steps.push_back(std::move(step_entry));
  return x;
}

SearchResult finish_tree(TreeRun& tree, Task& task) {
  SearchResult result;
  if (!tree.incomplete) {
    std::vector<ThoughtNode> final_nodes;
    for (int id : tree.beam) final_nodes.push_back(tree.nodes[id]);
    tree.verdict = task.verdict_from_nodes(final_nodes);
  }
  result.nodes = std::move(tree.nodes);
  result.beams = std::move(tree.beams);
  result.temperatures = std::move(tree.temperatures);
  if (tree.controller) result.history = tree.controller->state().history;
  result.verdict = tree.verdict;
  result.exhausted = tree.exhausted;
  result.incomplete = tree.incomplete;
  result.failure = tree.failure;
  result.dropped_proposals = tree.dropped_proposals;
  result.value_fallbacks = tree.value_fallbacks;
  result.transcript = {{"tree", tree.index},
                       {"steps", std::move(tree.steps)},
                       {"verdict", transcript_verdict_json(result.verdict)},
                       {"exhausted", result.exhausted},
                       {"incomplete", result.incomplete},
                       {"dropped_proposals", result.dropped_proposals},
                       {"value_fallbacks", result.value_fallbacks}};
  if (!result.failure.empty()) result.transcript["failure"] = result.failure;
  return result;
}

std::vector<SearchResult> run_trees(Task& task, Backend& backend,
                                    const SearchConfig& config,
                                    std::vector<TreeRun>& trees) {
  SwarmState swarm;
  swarm.personal_bests.clear();

  for (TreeRun& tree : trees) {
    ThoughtNode root;
    root.id = 0;
    root.depth = 0;
    root.content = task.root_content();
    tree.temperature = tree.controller->initial_temperature();
    root.temperature_used = tree.temperature;
    tree.nodes.push_back(root);
    tree.beam = {0};
  }

  for (int step = 1; step <= config.depth_limit; ++step) {
    std::vector<std::optional<double>> step_scores(trees.size());

    // All trees run step s before any controller sees step-s scores.
    for (TreeRun& tree : trees) {
      if (!tree.active()) continue;
      try {
        step_scores[tree.index] = execute_step(task, backend, config, tree, step);
      } catch (const BackendError& e) {
        tree.incomplete = true;
        tree.failure = e.what();
      }
    }

    // Barrier: fold scores into pb, recompute gb for the next step. The gb
    // consumed here is the previous barrier's maximum; at the first barrier
    // each tree falls back to its own score, which also seeds its pb.
    for (TreeRun& tree : trees) {
      if (!step_scores[tree.index]) continue;
      const double x = *step_scores[tree.index];
      const double gb = swarm.global_best.value_or(x);
      const double next = tree.controller->advance(x, gb);
      tree.steps.back()["pb"] = tree.controller->state().history.back().pb;
      tree.steps.back()["gb"] = gb;
      tree.steps.back()["next_temperature"] = next;
      tree.temperature = next;
    }

    swarm.personal_bests.clear();
    for (TreeRun& tree : trees) {
      const auto& pb = tree.controller->state().personal_best;
      if (pb) swarm.personal_bests.push_back(*pb);
    }
    if (!swarm.personal_bests.empty()) update_global_best(swarm);
  }

  std::vector<SearchResult> results;
  results.reserve(trees.size());
  for (TreeRun& tree : trees) results.push_back(finish_tree(tree, task));
  return results;
}

}  // namespace

std::unique_ptr<TemperatureController> make_method_controller(
    Method method, const PsoParams& params, const SearchConfig& config,
    std::uint64_t tree_seed) {
  switch (method) {
    case Method::t2ot:
      return make_pso_controller(params);
    case Method::tot:
      return make_fixed_controller(params.temp_init, params.temp_min,
                                   params.temp_max);
    case Method::tot_random:
      return make_random_controller(config.random_temp_min,
                                    config.random_temp_max,
                                    mix_seed(tree_seed, phase_tag_id("temp")));
    default:
      throw std::invalid_argument(
          "make_method_controller: io/cot baselines take no controller");
  }
}

SearchResult run_search(Task& task, Backend& backend,
                        TemperatureController& controller,
                        const SearchConfig& config) {
  config.validate();
  std::vector<TreeRun> trees(1);
  trees[0].index = 0;
  trees[0].seed = config.seed;
  trees[0].controller = &controller;
  return std::move(run_trees(task, backend, config, trees).front());
}

std::vector<SearchResult> run_swarm(Task& task, Backend& backend,
                                    const PsoParams& params,
                                    const SearchConfig& config) {
  config.validate();
  if (config.method == Method::io || config.method == Method::cot) {
    throw std::invalid_argument("run_swarm: io/cot use the baseline runners");
  }
  std::vector<std::unique_ptr<TemperatureController>> controllers;
  std::vector<TreeRun> trees(static_cast<std::size_t>(config.tree_count));
  for (int i = 0; i < config.tree_count; ++i) {
    const std::uint64_t tree_seed = config.seed + static_cast<std::uint64_t>(i);
    controllers.push_back(
        make_method_controller(config.method, params, config, tree_seed));
    trees[i].index = i;
    trees[i].seed = tree_seed;
    trees[i].controller = controllers.back().get();
  }
  return run_trees(task, backend, config, trees);
}

namespace {

SearchResult run_single_prompt(Task& task, Backend& backend,
                               const SearchConfig& config, double temp_init,
                               const std::string& prompt) {
  SearchResult result;
  ThoughtNode root;
  root.content = task.root_content();
  root.temperature_used = temp_init;
  result.nodes.push_back(root);

  CompletionRequest req;
  req.prompt = prompt;
  req.temperature = temp_init;
  req.sample_count = 1;
  req.tag = kPhasePropose;
  req.seed = request_seed(config.seed, 0, kPhasePropose, 0);

  json requests = json::array();
  try {
    const CompletionResponse resp = backend.complete(req);
    requests.push_back(transcript_request_json(kPhasePropose, 0, 0, req, resp));
    result.verdict = task.verdict_from_text(resp.samples.at(0));

    ThoughtNode answer;
    answer.id = 1;
    answer.parent_id = 0;
    answer.depth = 1;
    answer.content = resp.samples.at(0);
    answer.value = result.verdict.score;
    answer.temperature_used = temp_init;
    result.nodes.push_back(answer);
    result.beams.push_back({1});
  } catch (const BackendError& e) {
    result.incomplete = true;
    result.failure = e.what();
  }
  result.temperatures.push_back(temp_init);

  json step_entry = {{"step", 1},
                     {"temperature", temp_init},
                     {"requests", std::move(requests)},
                     {"candidates", json::array()},
                     {"dropped", 0},
                     {"drop_reasons", json::object()},
                     {"value_fallbacks", 0},
                     {"beam", result.beams.empty() ? std::vector<int>{}
                                                   : result.beams.front()}};
  result.transcript = {{"tree", 0},
                       {"steps", json::array({std::move(step_entry)})},
                       {"verdict", transcript_verdict_json(result.verdict)},
                       {"exhausted", false},
                       {"incomplete", result.incomplete},
                       {"dropped_proposals", 0},
                       {"value_fallbacks", 0}};
  if (!result.failure.empty()) result.transcript["failure"] = result.failure;
  return result;
}

}  // namespace

SearchResult run_io_baseline(Task& task, Backend& backend,
                             const SearchConfig& config, double temp_init) {
  return run_single_prompt(task, backend, config, temp_init, task.io_prompt());
}

SearchResult run_cot_baseline(Task& task, Backend& backend,
                              const SearchConfig& config, double temp_init) {
  return run_single_prompt(task, backend, config, temp_init, task.cot_prompt());
}

}  // namespace t2ot
