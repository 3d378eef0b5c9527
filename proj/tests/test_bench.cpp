#include <doctest.h>

#include <filesystem>

#include "t2ot/bench.hpp"

using namespace t2ot;
using namespace t2ot::bench;
using nlohmann::json;

namespace {

// Minimal record document carrying exactly the fields the reports read.
RunRecord fake_record(const std::string& task, const std::string& method,
                      json instance, const std::string& answer, bool success,
                      double score, long long prompt_tokens,
                      long long completion_tokens) {
  RunRecord r;
  r.doc = {{"format", "t2ot-run-v1"},
           {"config", {{"task", task}, {"method", method}}},
           {"instance", std::move(instance)},
           {"repeat", 0},
           {"run_seed", 0},
           {"transcript",
            {{"trees", json::array()},
             {"verdict",
              {{"success", success},
               {"answer", answer},
               {"score", score},
               {"flagged", false}}},
             {"usage",
              {{"phases", json::object()},
               {"total",
                {{"prompt_tokens", prompt_tokens},
                 {"completion_tokens", completion_tokens},
                 {"calls", 1},
                 {"estimated_responses", 0}}}}},
             {"counters",
              {{"dropped_proposals", 0},
               {"value_fallbacks", 0},
               {"vote_discards", 0},
               {"judge_fallbacks", 0},
               {"judge_clamps", 0}}},
             {"incomplete", false},
             {"wall_ms", 0.0}}}};
  return r;
}

json g24_instance() { return {{"index", 0}, {"numbers", {7, 5, 2, 6}}}; }

ExperimentConfig simulated_config(Method method,
                                  const std::vector<std::array<long long, 4>>& instances,
                                  std::uint64_t seed) {
  ExperimentConfig config = default_config(TaskKind::game24, method);
  config.seed = seed;
  config.search.seed = seed;
  config.policy = make_game24_policy(instances);
  return config;
}

}  // namespace

TEST_CASE("task presets carry the documented defaults") {
  const auto g24 = default_config(TaskKind::game24, Method::t2ot);
  CHECK(g24.pso.inertial_weight == 1.0);
  CHECK(g24.pso.accel_personal == 0.1);
  CHECK(g24.pso.accel_global == 0.1);
  CHECK(g24.pso.temp_init == 0.7);
  CHECK(g24.search.depth_limit == 3);
  CHECK(g24.search.beam_width == 5);
  CHECK(g24.search.value_samples == 3);
  CHECK(g24.search.tree_count == 1);

  const auto cw = default_config(TaskKind::creative_writing, Method::t2ot);
  CHECK(cw.pso.accel_personal == -0.005);
  CHECK(cw.pso.accel_global == -0.005);
  CHECK(cw.pso.temp_init == 0.7);
  CHECK(cw.search.depth_limit == 2);
  CHECK(cw.writing.plan_count == 5);
  CHECK(cw.writing.vote_rounds == 5);
}

TEST_CASE("config snapshots round-trip through JSON") {
  ExperimentConfig config = default_config(TaskKind::game24, Method::t2ot);
  config.seed = 99;
  config.policy = make_game24_policy({{7, 5, 2, 6}});
  const json snapshot = config.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(snapshot);
  CHECK(back.to_json().dump() == snapshot.dump());
}

TEST_CASE("config validation runs before any backend work") {
  ExperimentConfig config = default_config(TaskKind::game24, Method::t2ot);
  config.policy = make_game24_policy({{7, 5, 2, 6}});
  CHECK_NOTHROW(config.validate());

  ExperimentConfig no_policy = default_config(TaskKind::game24, Method::t2ot);
  CHECK_THROWS_AS(no_policy.validate(), std::invalid_argument);

  ExperimentConfig bad_backend = config;
  bad_backend.backend = "carrier-pigeon";
  CHECK_THROWS_AS(bad_backend.validate(), std::invalid_argument);

  ExperimentConfig bad_depth =
      default_config(TaskKind::creative_writing, Method::t2ot);
  bad_depth.policy = json::object();
  bad_depth.search.depth_limit = 3;
  CHECK_THROWS_AS(bad_depth.validate(), std::invalid_argument);
}

TEST_CASE("the generated game24 policy scripts the whole solution path") {
  const json policy = make_game24_policy({{7, 5, 2, 6}});
  const ScriptedPolicy parsed = ScriptedPolicy::from_json(policy);
  int propose_rules = 0;
  bool value_rule = false;
  for (const auto& rule : parsed.rules) {
    if (rule.phase == kPhasePropose && rule.key.rfind("Remaining", 0) == 0) {
      ++propose_rules;
      REQUIRE(rule.candidates.size() >= 2);
      CHECK(rule.candidates[0].weight == 2.0);
      CHECK(rule.candidates[1].weight == 1.0);
    }
    if (rule.phase == kPhaseValue) value_rule = true;
  }
  CHECK(propose_rules == 3);  // one per reasoning step
  CHECK(value_rule);
}

TEST_CASE("a small t2ot batch runs, solves and reports deterministically") {
  const std::vector<std::array<long long, 4>> instances = {
      {7, 5, 2, 6}, {3, 3, 8, 8}, {4, 6, 1, 1}};
  const ExperimentConfig config = simulated_config(Method::t2ot, instances, 5);

  const ExperimentOutput a = run_experiment_game24(config, instances);
  const ExperimentOutput b = run_experiment_game24(config, instances);
  REQUIRE(a.records.size() == 3);
  CHECK(a.report.doc.dump() == b.report.doc.dump());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].canonical() == b.records[i].canonical());
  }

  const json success = report_success(a.records);
  REQUIRE(success["rows"].size() == 1);
  CHECK(success["rows"][0]["runs"].get<int>() == 3);

  // At a near-zero fixed temperature every draw takes the scripted correct
  // move, so the whole batch solves.
  ExperimentConfig frozen = simulated_config(Method::tot, instances, 5);
  frozen.pso.temp_min = 0.001;
  frozen.pso.temp_init = 0.001;
  const auto solved = run_experiment_game24(frozen, instances);
  const json frozen_success = report_success(solved.records);
  CHECK(frozen_success["rows"][0]["verified"].get<int>() == 3);
}

TEST_CASE("tot equals t2ot with zero coefficients, verdicts included") {
  const std::vector<std::array<long long, 4>> instances = {{7, 5, 2, 6}};
  ExperimentConfig zeroed = simulated_config(Method::t2ot, instances, 8);
  zeroed.pso.accel_personal = 0.0;
  zeroed.pso.accel_global = 0.0;
  const ExperimentConfig tot = simulated_config(Method::tot, instances, 8);

  const auto a = run_experiment_game24(zeroed, instances);
  const auto b = run_experiment_game24(tot, instances);
  CHECK(a.records[0].transcript().dump() == b.records[0].transcript().dump());
}

TEST_CASE("report_success recomputes verification from transcripts") {
  std::vector<RunRecord> records;
  for (int i = 0; i < 4; ++i) {
    records.push_back(fake_record("game24", "t2ot", g24_instance(),
                                  "(7-5)*2*6", true, 1.0, 100, 200));
  }
  // Flagged success but a wrong expression: the recomputation rejects it.
  records.push_back(fake_record("game24", "t2ot", g24_instance(), "(7+5)*2",
                                true, 1.0, 100, 200));
  const json table = report_success(records);
  REQUIRE(table["rows"].size() == 1);
  CHECK(table["rows"][0]["runs"].get<int>() == 5);
  CHECK(table["rows"][0]["verified"].get<int>() == 4);
  CHECK(table["rows"][0]["rate_percent"].get<double>() ==
        doctest::Approx(80.0));
  CHECK(table["rows"][0]["display"].get<std::string>() == "80.0%");
}

TEST_CASE("report_diversity keeps failed runs in the denominator") {
  std::vector<RunRecord> records;
  for (int i = 0; i < 5; ++i) {
    records.push_back(fake_record("game24", "t2ot", g24_instance(),
                                  "(7-5)*2*6", true, 1.0, 10, 10));
  }
  for (int i = 0; i < 3; ++i) {
    records.push_back(fake_record("game24", "t2ot", g24_instance(),
                                  "6*2+7+5", true, 1.0, 10, 10));
  }
  for (int i = 0; i < 2; ++i) {
    records.push_back(
        fake_record("game24", "t2ot", g24_instance(), "", false, 0.0, 10, 10));
  }
  const json table = report_diversity(records);
  REQUIRE(table["rows"].size() == 1);
  const auto& row = table["rows"][0];
  CHECK(row["runs"].get<int>() == 10);
  CHECK(row["solved"].get<int>() == 8);
  CHECK(row["failed"].get<int>() == 2);
  const auto freqs = row["frequencies"].get<std::vector<double>>();
  REQUIRE(freqs.size() == 2);
  CHECK(freqs[0] == doctest::Approx(0.5));
  CHECK(freqs[1] == doctest::Approx(0.3));
}

TEST_CASE("report_scores renders mean and sample standard deviation") {
  std::vector<RunRecord> records;
  for (double score : {60.0, 70.0, 80.0}) {
    records.push_back(fake_record("creative-writing", "t2ot",
                                  {{"index", 0}, {"sentences", {"a", "b", "c", "d"}}},
                                  "passage", true, score, 10, 10));
  }
  const json table = report_scores(records);
  REQUIRE(table["rows"].size() == 1);
  CHECK(table["rows"][0]["mean"].get<double>() == doctest::Approx(70.0));
  CHECK(table["rows"][0]["std"].get<double>() == doctest::Approx(10.0));
  CHECK(table["rows"][0]["display"].get<std::string>() ==
        "70.00 ± 10.00");

  const std::vector<RunRecord> single = {records[0]};
  const json one = report_scores(single);
  CHECK(one["rows"][0]["std"].get<double>() == 0.0);
  CHECK(one["rows"][0]["flagged"].get<bool>());
}

TEST_CASE("report_cost recomputes prices and renders k-units") {
  std::vector<RunRecord> records;
  records.push_back(fake_record("game24", "t2ot", g24_instance(), "", false,
                                0.0, 1600, 5500));
  const PriceTable prices{0.01, 0.03};
  const json table = report_cost(records, prices);
  REQUIRE(table["rows"].size() == 1);
  const auto& row = table["rows"][0];
  CHECK(row["tokens_display"].get<std::string>() == "5.5k / 1.6k");
  CHECK(row["cost_per_case"].get<double>() ==
        doctest::Approx(1600 / 1000.0 * 0.01 + 5500 / 1000.0 * 0.03));

  const json zero = report_cost(
      {fake_record("game24", "io", g24_instance(), "", false, 0.0, 0, 0)},
      prices);
  CHECK(zero["rows"][0]["cost_per_case"].get<double>() == 0.0);
}

TEST_CASE("every bundle carries the fallback and drop counters") {
  const std::vector<std::array<long long, 4>> instances = {{7, 5, 2, 6}};
  const ExperimentConfig config = simulated_config(Method::t2ot, instances, 3);
  const auto out = run_experiment_game24(config, instances);
  const json& doc = out.report.doc;
  REQUIRE(doc.contains("counters"));
  const auto& row = doc["counters"]["rows"][0];
  for (const char* key : {"dropped_proposals", "value_fallbacks",
                          "vote_discards", "judge_fallbacks", "judge_clamps"}) {
    CHECK(row.contains(key));
  }
  CHECK(out.report.text.find("Fallback and drop counters") != std::string::npos);
  CHECK(!out.report.csv.empty());
}

TEST_CASE("replay regenerates stored records byte-for-byte") {
  const std::vector<std::array<long long, 4>> instances = {{7, 5, 2, 6},
                                                           {3, 3, 8, 8}};
  const ExperimentConfig config = simulated_config(Method::t2ot, instances, 31);
  const auto out = run_experiment_game24(config, instances);
  for (const RunRecord& record : out.records) {
    const ReplayResult result = replay_record(record.doc);
    CHECK(result.identical);
  }

  // Tampering with the transcript is caught.
  json tampered = out.records[0].doc;
  tampered["transcript"]["verdict"]["answer"] = "(7+5)*2";
  CHECK(!replay_record(tampered).identical);

  // Tampering with the config snapshot trips the hash check.
  json bad_config = out.records[0].doc;
  bad_config["config"]["seed"] = 12345;
  const ReplayResult hashed = replay_record(bad_config);
  CHECK(!hashed.identical);
  CHECK(hashed.detail.find("hash") != std::string::npos);
}

TEST_CASE("records and reports land on disk and reload") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "t2ot_bench_test";
  fs::remove_all(dir);

  const std::vector<std::array<long long, 4>> instances = {{7, 5, 2, 6}};
  ExperimentConfig config = simulated_config(Method::t2ot, instances, 1);
  config.out_dir = dir.string();
  config.repeats = 2;
  const auto out = run_experiment_game24(config, instances);
  CHECK(out.records.size() == 2);

  const auto loaded = load_records_dir((dir / "records").string());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].canonical() == out.records[0].canonical());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "report.csv"));

  const auto rebuilt = build_report(loaded, config.prices);
  CHECK(rebuilt.doc.dump() == out.report.doc.dump());
  fs::remove_all(dir);
}

TEST_CASE("writing batches run end to end on the scripted policy") {
  const auto instances = cw::generate_writing_instances(2, 11);
  ExperimentConfig config =
      default_config(TaskKind::creative_writing, Method::t2ot);
  config.seed = 11;
  config.policy = make_writing_policy(instances);
  const auto out = run_experiment_writing(config, instances);
  REQUIRE(out.records.size() == 2);
  for (const RunRecord& r : out.records) {
    CHECK(r.transcript()["verdict"]["score"].get<double>() >= 0.0);
    CHECK(r.transcript()["trees"][0]["steps"].size() == 2);
  }
  const json scores = report_scores(out.records);
  REQUIRE(scores["rows"].size() == 1);
  CHECK(scores["rows"][0]["runs"].get<int>() == 2);
}
