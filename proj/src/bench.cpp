#include "t2ot/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "t2ot/game24_task.hpp"
#include "t2ot/util.hpp"

namespace t2ot::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string task_name(TaskKind task) {
  return task == TaskKind::game24 ? "game24" : "creative-writing";
}

std::optional<TaskKind> task_from_name(const std::string& name) {
  if (name == "game24") return TaskKind::game24;
  if (name == "creative-writing") return TaskKind::creative_writing;
  return std::nullopt;
}

// ---- config ---------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (parallel < 1) throw std::invalid_argument("parallel must be >= 1");
  if (backend != "simulated" && backend != "http") {
    throw std::invalid_argument("backend must be simulated or http");
  }
  if (prices.prompt_per_1k < 0.0 || prices.completion_per_1k < 0.0) {
    throw std::invalid_argument("prices must be >= 0");
  }
  pso.validate();
  writing.validate();
  SearchConfig probe = search;
  probe.method = method;
  probe.validate();
  if (task == TaskKind::creative_writing && search.depth_limit != 2) {
    throw std::invalid_argument("creative-writing runs exactly 2 steps");
  }
  if (backend == "simulated" && !policy.is_object()) {
    throw std::invalid_argument("simulated backend needs a scripted policy");
  }
  if (policy.is_object()) {
    ScriptedPolicy::from_json(policy);  // shape check
  }
}

json ExperimentConfig::to_json() const {
  return {
      {"task", task_name(task)},
      {"method", method_name(method)},
      {"pso",
       {{"inertial_weight", pso.inertial_weight},
        {"accel_personal", pso.accel_personal},
        {"accel_global", pso.accel_global},
        {"temp_min", pso.temp_min},
        {"temp_max", pso.temp_max},
        {"temp_init", pso.temp_init}}},
      {"search",
       {{"depth_limit", search.depth_limit},
        {"beam_width", search.beam_width},
        {"value_samples", search.value_samples},
        {"tree_count", search.tree_count},
        {"step_score", search.step_score == StepScore::max ? "max" : "mean"},
        {"random_temp_min", search.random_temp_min},
        {"random_temp_max", search.random_temp_max}}},
      {"writing",
       {{"plan_count", writing.plan_count},
        {"vote_rounds", writing.vote_rounds},
        {"score_all_plans", writing.score_all_plans},
        {"judge_body", writing.judge_body}}},
      {"value_map",
       {{"sure", value_map.sure},
        {"maybe", value_map.maybe},
        {"impossible", value_map.impossible}}},
      {"backend", backend},
      {"policy", policy.is_object() ? policy : json::object()},
      {"http",
       {{"base_url", http.base_url},
        {"path", http.path},
        {"model", http.model},
        {"api_key_env", http.api_key_env},
        {"timeout_seconds", http.timeout_seconds}}},
      {"prices",
       {{"prompt_per_1k", prices.prompt_per_1k},
        {"completion_per_1k", prices.completion_per_1k}}},
      {"dataset", dataset_path},
      {"repeats", repeats},
      {"seed", seed},
  };
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  ExperimentConfig c;
  if (doc.contains("task")) {
    const auto t = task_from_name(doc["task"].get<std::string>());
    if (!t) throw std::invalid_argument("unknown task in config");
    c.task = *t;
  }
  if (doc.contains("method")) {
    const auto m = method_from_name(doc["method"].get<std::string>());
    if (!m) throw std::invalid_argument("unknown method in config");
    c.method = *m;
  }
  if (doc.contains("pso")) {
    const json& p = doc["pso"];
    c.pso.inertial_weight = p.value("inertial_weight", c.pso.inertial_weight);
    c.pso.accel_personal = p.value("accel_personal", c.pso.accel_personal);
    c.pso.accel_global = p.value("accel_global", c.pso.accel_global);
    c.pso.temp_min = p.value("temp_min", c.pso.temp_min);
    c.pso.temp_max = p.value("temp_max", c.pso.temp_max);
    c.pso.temp_init = p.value("temp_init", c.pso.temp_init);
  }
  if (doc.contains("search")) {
    const json& s = doc["search"];
    c.search.depth_limit = s.value("depth_limit", c.search.depth_limit);
    c.search.beam_width = s.value("beam_width", c.search.beam_width);
    c.search.value_samples = s.value("value_samples", c.search.value_samples);
    c.search.tree_count = s.value("tree_count", c.search.tree_count);
    c.search.step_score = s.value("step_score", std::string("max")) == "mean"
                              ? StepScore::mean
                              : StepScore::max;
    c.search.random_temp_min = s.value("random_temp_min", c.search.random_temp_min);
    c.search.random_temp_max = s.value("random_temp_max", c.search.random_temp_max);
  }
  if (doc.contains("writing")) {
    const json& w = doc["writing"];
    c.writing.plan_count = w.value("plan_count", c.writing.plan_count);
    c.writing.vote_rounds = w.value("vote_rounds", c.writing.vote_rounds);
    c.writing.score_all_plans =
        w.value("score_all_plans", c.writing.score_all_plans);
    c.writing.judge_body = w.value("judge_body", c.writing.judge_body);
  }
  if (doc.contains("value_map")) {
    const json& v = doc["value_map"];
    c.value_map.sure = v.value("sure", c.value_map.sure);
    c.value_map.maybe = v.value("maybe", c.value_map.maybe);
    c.value_map.impossible = v.value("impossible", c.value_map.impossible);
  }
  c.backend = doc.value("backend", c.backend);
  if (doc.contains("policy")) c.policy = doc["policy"];
  if (doc.contains("http")) {
    const json& h = doc["http"];
    c.http.base_url = h.value("base_url", c.http.base_url);
    c.http.path = h.value("path", c.http.path);
    c.http.model = h.value("model", c.http.model);
    c.http.api_key_env = h.value("api_key_env", c.http.api_key_env);
    c.http.timeout_seconds = h.value("timeout_seconds", c.http.timeout_seconds);
  }
  if (doc.contains("prices")) {
    const json& p = doc["prices"];
    c.prices.prompt_per_1k = p.value("prompt_per_1k", c.prices.prompt_per_1k);
    c.prices.completion_per_1k =
        p.value("completion_per_1k", c.prices.completion_per_1k);
  }
  c.dataset_path = doc.value("dataset", c.dataset_path);
  c.repeats = doc.value("repeats", c.repeats);
  c.seed = doc.value("seed", c.seed);
  c.out_dir = doc.value("out_dir", c.out_dir);
  c.parallel = doc.value("parallel", c.parallel);
  c.search.method = c.method;
  c.search.seed = c.seed;
  return c;
}

ExperimentConfig default_config(TaskKind task, Method method) {
  ExperimentConfig c;
  c.task = task;
  c.method = method;
  if (task == TaskKind::game24) {
    c.pso = PsoParams{1.0, 0.1, 0.1, 0.1, 1.0, 0.7};
    c.search.depth_limit = 3;
    c.search.beam_width = 5;
    c.search.value_samples = 3;
  } else {
    c.pso = PsoParams{1.0, -0.005, -0.005, 0.1, 1.0, 0.7};
    c.search.depth_limit = 2;
    c.search.beam_width = 1;
    c.search.value_samples = 1;
    c.writing.plan_count = 5;
    c.writing.vote_rounds = 5;
  }
  c.search.tree_count = 1;
  c.search.method = method;
  return c;
}

// ---- records -----------------------------------------------------------------------

std::string RunRecord::method() const {
  return doc.at("config").value("method", "");
}

std::string RunRecord::task() const {
  return doc.at("config").value("task", "");
}

std::string config_hash(const json& config_snapshot) {
  return to_hex(fnv1a64(config_snapshot.dump()));
}

namespace {

std::unique_ptr<Backend> make_backend(const ExperimentConfig& config,
                                      const std::string& task,
                                      std::uint64_t run_seed) {
  if (config.backend == "simulated") {
    return std::make_unique<SimulatedBackend>(
        ScriptedPolicy::from_json(config.policy), task);
  }
  RetryPolicy retry;
  retry.jitter_seed = run_seed;
  return std::make_unique<HttpBackend>(config.http, retry);
}

Verdict aggregate_verdicts(const std::vector<Verdict>& verdicts) {
  Verdict best;
  bool first = true;
  for (const Verdict& v : verdicts) {
    const bool better =
        first || (v.success && !best.success) ||
        (v.success == best.success && v.score > best.score);
    if (better) {
      best = v;
      first = false;
    }
  }
  return best;
}

json counters_json(long long dropped, long long value_fallbacks,
                   long long vote_discards, long long judge_fallbacks,
                   long long judge_clamps) {
  return {{"dropped_proposals", dropped},
          {"value_fallbacks", value_fallbacks},
          {"vote_discards", vote_discards},
          {"judge_fallbacks", judge_fallbacks},
          {"judge_clamps", judge_clamps}};
}

RunRecord assemble_record(const ExperimentConfig& config, json instance_json,
                          int repeat, std::uint64_t run_seed, json trees,
                          const Verdict& verdict, const UsageLedger& ledger,
                          json counters, bool incomplete, double wall_ms) {
  json snapshot = config.to_json();
  RunRecord record;
  record.doc = {{"format", "t2ot-run-v1"},
                {"config", snapshot},
                {"config_hash", config_hash(snapshot)},
                {"instance", std::move(instance_json)},
                {"repeat", repeat},
                {"run_seed", run_seed},
                {"transcript",
                 {{"trees", std::move(trees)},
                  {"verdict", transcript_verdict_json(verdict)},
                  {"usage", ledger.to_json()},
                  {"counters", std::move(counters)},
                  {"incomplete", incomplete},
                  {"wall_ms", wall_ms}}}};
  return record;
}

}  // namespace

RunRecord run_game24_once(const ExperimentConfig& config,
                          const std::array<long long, 4>& instance,
                          int instance_index, int repeat,
                          std::uint64_t run_seed) {
  SearchConfig scfg = config.search;
  scfg.method = config.method;
  scfg.seed = run_seed;

  game24::Game24Task task(instance, config.value_map);
  UsageLedger ledger;
  auto backend = make_backend(config, task.name(), run_seed);
  backend->attach_ledger(&ledger);

  const auto started = std::chrono::steady_clock::now();
  std::vector<SearchResult> results;
  if (config.method == Method::io) {
    results.push_back(
        run_io_baseline(task, *backend, scfg, config.pso.temp_init));
  } else if (config.method == Method::cot) {
    results.push_back(
        run_cot_baseline(task, *backend, scfg, config.pso.temp_init));
  } else {
    results = run_swarm(task, *backend, config.pso, scfg);
  }
  double wall_ms = 0.0;
  if (config.backend != "simulated") {
    wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - started)
                  .count();
  }

  json trees = json::array();
  std::vector<Verdict> verdicts;
  long long dropped = 0;
  long long fallbacks = 0;
  bool incomplete = false;
  for (SearchResult& r : results) {
    trees.push_back(std::move(r.transcript));
    verdicts.push_back(r.verdict);
    dropped += r.dropped_proposals;
    fallbacks += r.value_fallbacks;
    incomplete = incomplete || r.incomplete;
  }

  json instance_json = {{"index", instance_index},
                        {"numbers", std::vector<long long>(instance.begin(),
                                                           instance.end())}};
  return assemble_record(config, std::move(instance_json), repeat, run_seed,
                         std::move(trees), aggregate_verdicts(verdicts), ledger,
                         counters_json(dropped, fallbacks, 0, 0, 0), incomplete,
                         wall_ms);
}

RunRecord run_writing_once(const ExperimentConfig& config,
                           const cw::WritingInstance& instance,
                           int instance_index, int repeat,
                           std::uint64_t run_seed) {
  SearchConfig scfg = config.search;
  scfg.method = config.method;
  scfg.seed = run_seed;

  UsageLedger ledger;
  auto backend = make_backend(config, "creative-writing", run_seed);
  backend->attach_ledger(&ledger);

  const auto started = std::chrono::steady_clock::now();
  std::vector<cw::WritingResult> results;
  if (config.method == Method::io) {
    results.push_back(run_writing_io(instance, *backend, scfg, config.writing,
                                     config.pso.temp_init));
  } else if (config.method == Method::cot) {
    results.push_back(run_writing_cot(instance, *backend, scfg, config.writing,
                                      config.pso.temp_init));
  } else {
    results = cw::run_writing_swarm(instance, *backend, config.pso, scfg,
                                    config.writing);
  }
  double wall_ms = 0.0;
  if (config.backend != "simulated") {
    wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - started)
                  .count();
  }

  json trees = json::array();
  std::vector<Verdict> verdicts;
  long long vote_discards = 0;
  long long judge_fallbacks = 0;
  long long judge_clamps = 0;
  bool incomplete = false;
  for (cw::WritingResult& r : results) {
    trees.push_back(std::move(r.transcript));
    verdicts.push_back(r.verdict);
    vote_discards += r.vote_discards;
    judge_fallbacks += r.judge_fallbacks;
    judge_clamps += r.judge_clamps;
    incomplete = incomplete || r.incomplete;
  }

  json instance_json = {
      {"index", instance_index},
      {"id", instance.id},
      {"sentences", std::vector<std::string>(instance.sentences.begin(),
                                             instance.sentences.end())}};
  return assemble_record(
      config, std::move(instance_json), repeat, run_seed, std::move(trees),
      aggregate_verdicts(verdicts), ledger,
      counters_json(0, 0, vote_discards, judge_fallbacks, judge_clamps),
      incomplete, wall_ms);
}

// ---- experiment driver -----------------------------------------------------------------

namespace {

struct RunJob {
  int instance_index = 0;
  int repeat = 0;
};

template <typename RunOnce>
std::vector<RunRecord> execute_jobs(const ExperimentConfig& config,
                                    std::size_t job_count, RunOnce run_once) {
  std::vector<RunJob> jobs;
  jobs.reserve(job_count * static_cast<std::size_t>(config.repeats));
  for (std::size_t i = 0; i < job_count; ++i) {
    for (int r = 0; r < config.repeats; ++r) {
      jobs.push_back({static_cast<int>(i), r});
    }
  }
  std::vector<RunRecord> records(jobs.size());

  const auto run_job = [&](std::size_t j) {
    const RunJob& job = jobs[j];
    const std::uint64_t run_seed =
        mix_seed(config.seed, static_cast<std::uint64_t>(job.instance_index),
                 static_cast<std::uint64_t>(job.repeat));
    records[j] = run_once(job.instance_index, job.repeat, run_seed);
  };

  const int workers =
      std::min<int>(config.parallel, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t j = next.fetch_add(1);
          if (j >= jobs.size()) return;
          run_job(j);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return records;
}

void write_outputs(const ExperimentConfig& config,
                   const std::vector<RunRecord>& records,
                   const ReportBundle& report) {
  if (config.out_dir.empty()) return;
  const fs::path out(config.out_dir);
  fs::create_directories(out / "records");
  for (const RunRecord& record : records) {
    const int idx = record.doc["instance"]["index"].get<int>();
    const int rep = record.doc["repeat"].get<int>();
    char name[64];
    std::snprintf(name, sizeof(name), "run_%04d_%02d.json", idx, rep);
    write_text_file((out / "records" / name).string(),
                    record.doc.dump(2) + "\n");
  }
  write_text_file((out / "report.json").string(), report.doc.dump(2) + "\n");
  write_text_file((out / "report.txt").string(), report.text);
  write_text_file((out / "report.csv").string(), report.csv);
}

}  // namespace

ExperimentOutput run_experiment_game24(
    const ExperimentConfig& config,
    const std::vector<std::array<long long, 4>>& instances) {
  config.validate();
  if (instances.empty()) throw std::invalid_argument("no instances");
  std::vector<RunRecord> records = execute_jobs(
      config, instances.size(), [&](int idx, int rep, std::uint64_t seed) {
        return run_game24_once(config, instances[static_cast<std::size_t>(idx)],
                               idx, rep, seed);
      });
  ExperimentOutput out;
  out.report = build_report(records, config.prices);
  out.records = std::move(records);
  write_outputs(config, out.records, out.report);
  return out;
}

ExperimentOutput run_experiment_writing(
    const ExperimentConfig& config,
    const std::vector<cw::WritingInstance>& instances) {
  config.validate();
  if (instances.empty()) throw std::invalid_argument("no instances");
  std::vector<RunRecord> records = execute_jobs(
      config, instances.size(), [&](int idx, int rep, std::uint64_t seed) {
        return run_writing_once(config,
                                instances[static_cast<std::size_t>(idx)], idx,
                                rep, seed);
      });
  ExperimentOutput out;
  out.report = build_report(records, config.prices);
  out.records = std::move(records);
  write_outputs(config, out.records, out.report);
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.dataset_path.empty()) {
    throw std::invalid_argument("run_experiment: dataset path required");
  }
  if (config.task == TaskKind::game24) {
    return run_experiment_game24(config,
                                 game24::load_instances(config.dataset_path));
  }
  return run_experiment_writing(
      config, cw::load_writing_instances(config.dataset_path));
}

// ---- replay ---------------------------------------------------------------------------

ReplayResult replay_record(const json& stored) {
  if (!stored.contains("config") || !stored.contains("instance") ||
      !stored.contains("run_seed")) {
    return {false, "not a run record"};
  }
  const json& snapshot = stored["config"];
  if (stored.value("config_hash", "") != config_hash(snapshot)) {
    return {false, "config hash mismatch; snapshot was altered"};
  }
  ExperimentConfig config = ExperimentConfig::from_json(snapshot);
  if (config.backend != "simulated") {
    return {false, "only simulated-backend records can be replayed"};
  }
  const int index = stored["instance"].value("index", 0);
  const int repeat = stored.value("repeat", 0);
  const std::uint64_t run_seed = stored["run_seed"].get<std::uint64_t>();

  RunRecord regen;
  if (config.task == TaskKind::game24) {
    const auto numbers =
        stored["instance"]["numbers"].get<std::vector<long long>>();
    if (numbers.size() != 4) return {false, "instance needs 4 numbers"};
    regen = run_game24_once(
        config, {numbers[0], numbers[1], numbers[2], numbers[3]}, index,
        repeat, run_seed);
  } else {
    cw::WritingInstance instance;
    instance.id = stored["instance"].value("id", 0);
    const auto sentences =
        stored["instance"]["sentences"].get<std::vector<std::string>>();
    if (sentences.size() != 4) return {false, "instance needs 4 sentences"};
    std::copy(sentences.begin(), sentences.end(), instance.sentences.begin());
    regen = run_writing_once(config, instance, index, repeat, run_seed);
  }

  const std::string a = stored.dump();
  const std::string b = regen.canonical();
  if (a == b) return {true, "identical"};
  std::size_t at = 0;
  while (at < a.size() && at < b.size() && a[at] == b[at]) ++at;
  return {false, "differs at byte " + std::to_string(at)};
}

// ---- scripted policies --------------------------------------------------------------------

namespace {

using game24::Game24State;
using game24::Op;
using game24::ProposalParse;
using game24::Rational;

std::string candidate_line(const Game24State& state, const Rational& a, Op op,
                           const Rational& b) {
  const auto c = [&]() -> std::optional<Rational> {
    switch (op) {
      case Op::add: return a + b;
      case Op::sub: return a - b;
      case Op::mul: return a * b;
      case Op::divide: return game24::divide(a, b);
    }
    return std::nullopt;
  }();
  if (!c) return "";
  const std::string raw = a.str() + " " + game24::op_symbol(op) + " " +
                          b.str() + " = " + c->str() + " (left: -)";
  const ProposalParse parsed = game24::parse_proposal(state, raw);
  return parsed.next ? parsed.next->trace.back().line : "";
}

// All legal one-step lines from a state, deterministic order.
std::vector<std::string> legal_lines(const Game24State& state) {
  std::vector<std::string> lines;
  const auto& values = state.remaining;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const Rational& a = values[i];
      const Rational& b = values[j];
      for (Op op : {Op::add, Op::sub, Op::mul, Op::divide}) {
        const std::string line = candidate_line(state, a, op, b);
        if (!line.empty()) lines.push_back(line);
        if (op == Op::sub || op == Op::divide) {
          const std::string swapped = candidate_line(state, b, op, a);
          if (!swapped.empty()) lines.push_back(swapped);
        }
      }
    }
  }
  return lines;
}

// Depth-first path of normalized lines reaching 24, if one exists.
std::optional<std::vector<std::string>> solve_lines(const Game24State& state) {
  if (state.remaining.size() == 1) {
    if (state.remaining[0] == Rational::integer(24)) {
      return std::vector<std::string>{};
    }
    return std::nullopt;
  }
  for (const std::string& line : legal_lines(state)) {
    const ProposalParse parsed = game24::parse_proposal(state, line);
    if (!parsed.next) continue;
    if (auto rest = solve_lines(*parsed.next)) {
      rest->insert(rest->begin(), line);
      return rest;
    }
  }
  return std::nullopt;
}

std::string propose_key(const Game24State& state) {
  return "Remaining numbers: " + state.remaining_text() + "\n";
}

}  // namespace

json make_game24_policy(const std::vector<std::array<long long, 4>>& instances,
                        double correct_weight, double decoy_weight) {
  json rules = json::array();
  std::set<std::string> seen_keys;

  for (const auto& origin : instances) {
    Game24State state = game24::initial_state(origin);
    const auto path = solve_lines(state);
    if (!path) continue;  // unsolvable instances get no propose rules

    // Propose rules along the solution path: correct move plus one decoy.
    for (const std::string& correct : *path) {
      const std::string key = propose_key(state);
      const ProposalParse parsed = game24::parse_proposal(state, correct);
      if (seen_keys.insert(key).second) {
        json candidates = json::array();
        candidates.push_back({{"text", correct}, {"weight", correct_weight}});
        for (const std::string& line : legal_lines(state)) {
          if (line != correct) {
            candidates.push_back({{"text", line}, {"weight", decoy_weight}});
            break;
          }
        }
        rules.push_back({{"task", "game24"},
                         {"phase", kPhasePropose},
                         {"key", key},
                         {"candidates", candidates}});
      }
      state = *parsed.next;
    }

    // Answer rule for the io/cot prompts, with a non-verifying decoy.
    const auto final_state = game24::state_from_content(
        origin, [&path] {
          std::string content;
          for (const std::string& line : *path) {
            if (!content.empty()) content += '\n';
            content += line;
          }
          return content;
        }());
    if (final_state) {
      if (const auto expr = game24::expression_from_trace(*final_state)) {
        std::string origin_key = "numbers ";
        for (std::size_t i = 0; i < origin.size(); ++i) {
          if (i > 0) origin_key += ' ';
          origin_key += std::to_string(origin[i]);
        }
        origin_key += " with";
        if (seen_keys.insert("answer:" + origin_key).second) {
          const auto sum = game24::make_node(
              Op::add,
              game24::make_node(
                  Op::add,
                  game24::make_node(Op::add, game24::make_leaf(origin[0]),
                                    game24::make_leaf(origin[1])),
                  game24::make_leaf(origin[2])),
              game24::make_leaf(origin[3]));
          const bool sum_is_24 =
              game24::evaluate(*sum) == Rational::integer(24);
          json candidates = json::array();
          candidates.push_back(
              {{"text", "Answer: " + game24::render(*expr)},
               {"weight", correct_weight}});
          candidates.push_back(
              {{"text", sum_is_24 ? "Answer: 1+1+1+1"
                                  : "Answer: " + game24::render(*sum)},
               {"weight", decoy_weight}});
          rules.push_back({{"task", "game24"},
                           {"phase", kPhasePropose},
                           {"key", origin_key},
                           {"candidates", candidates}});
        }
      }
    }
  }

  rules.push_back({{"task", "game24"},
                   {"phase", kPhaseValue},
                   {"key", ""},
                   {"candidates", json::array({{{"text", "sure"},
                                                {"weight", 1.0}}})}});
  return {{"fallback", "no scripted response"}, {"rules", rules}};
}

json make_writing_policy(const std::vector<cw::WritingInstance>& instances) {
  json rules = json::array();
  for (const cw::WritingInstance& instance : instances) {
    const std::string key = "1. " + instance.sentences[0];

    json plans = json::array();
    plans.push_back(
        {{"text",
          "1. Set the scene.\n2. Introduce the tension.\n3. Turn it over.\n"
          "4. Resolve quietly."},
         {"weight", 2.0}});
    plans.push_back(
        {{"text",
          "1. Start mid-action.\n2. Flash back.\n3. Return to the present.\n"
          "4. Close the loop."},
         {"weight", 1.0}});
    plans.push_back(
        {{"text",
          "1. Describe the place.\n2. Follow one character.\n3. Let them "
          "fail.\n4. Let them accept it."},
         {"weight", 1.0}});
    rules.push_back({{"task", "creative-writing"},
                     {"phase", kPhasePropose},
                     {"key", key},
                     {"candidates", plans}});

    std::string good;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i > 0) good += "\n\n";
      good += "The section unfolds at its own pace and settles where it "
              "must. " +
              instance.sentences[i];
    }
    std::string broken;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i > 0) broken += "\n\n";
      broken += "A hurried section that loses track of the endings. " +
                instance.sentences[i];
    }
    rules.push_back(
        {{"task", "creative-writing"},
         {"phase", kPhaseWrite},
         {"key", key},
         {"candidates", json::array({{{"text", good}, {"weight", 2.0}},
                                     {{"text", broken}, {"weight", 1.0}}})}});

    rules.push_back(
        {{"task", "creative-writing"},
         {"phase", kPhaseVote},
         {"key", key},
         {"candidates",
          json::array({{{"text", "best plan is 1"}, {"weight", 2.0}},
                       {{"text", "best plan is 2"}, {"weight", 1.0}}})}});

    rules.push_back(
        {{"task", "creative-writing"},
         {"phase", kPhaseJudge},
         {"key", instance.sentences[0]},
         {"candidates",
          json::array(
              {{{"text", "The paragraphs hold together and the endings land "
                         "naturally. Thus, the coherency score is 62"},
                {"weight", 2.0}},
               {{"text", "A confident, well-paced passage. Thus, the "
                         "coherency score is 78"},
                {"weight", 1.0}},
               {{"text", "Transitions feel abrupt in places. Thus, the "
                         "coherency score is 55"},
                {"weight", 1.0}}})}});
  }
  return {{"fallback", "no scripted response"}, {"rules", rules}};
}

// ---- files -----------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

std::vector<RunRecord> load_records_dir(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RunRecord> records;
  for (const std::string& path : paths) {
    RunRecord record;
    record.doc = json::parse(read_text_file(path));
    if (record.doc.value("format", "") != "t2ot-run-v1") continue;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace t2ot::bench
