#pragma once

/**
 * Experiment runner and report generation.
 *
 * A run record is a self-contained JSON document: config snapshot (with the
 * scripted policy embedded), instance, run seed and the full transcript.
 * Replaying a stored simulated record regenerates it byte-for-byte, and every
 * report figure is recomputed from records, never trusted from run flags.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2ot/backend.hpp"
#include "t2ot/creative_writing.hpp"
#include "t2ot/game24.hpp"
#include "t2ot/http_backend.hpp"
#include "t2ot/search.hpp"
#include "t2ot/temperature.hpp"

namespace t2ot::bench {

enum class TaskKind { game24, creative_writing };

std::string task_name(TaskKind task);
std::optional<TaskKind> task_from_name(const std::string& name);

struct ExperimentConfig {
  TaskKind task = TaskKind::game24;
  Method method = Method::t2ot;
  PsoParams pso;
  SearchConfig search;
  cw::WritingConfig writing;
  game24::ValueMapping value_map;
  std::string backend = "simulated";  // simulated | http
  nlohmann::json policy;              // scripted policy, embedded for replay
  HttpEndpointConfig http;
  PriceTable prices;
  std::string dataset_path;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  int parallel = 1;

  void validate() const;  // throws std::invalid_argument before any backend call
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

/// Canonical defaults for a task/method pair:
/// game24: depth 3, beam 5, k 3, trees 1, w0=1, a=0.1, T0=0.7
/// creative-writing: depth 2, 5 plans, 5 votes, trees 1, w0=1, a=-0.005, T0=0.7
ExperimentConfig default_config(TaskKind task, Method method);

struct RunRecord {
  nlohmann::json doc;

  std::string canonical() const { return doc.dump(); }
  std::string method() const;
  std::string task() const;
  const nlohmann::json& transcript() const { return doc.at("transcript"); }
};

/// Hash stored next to the config snapshot (FNV-1a of the snapshot dump).
std::string config_hash(const nlohmann::json& config_snapshot);

RunRecord run_game24_once(const ExperimentConfig& config,
                          const std::array<long long, 4>& instance,
                          int instance_index, int repeat,
                          std::uint64_t run_seed);

RunRecord run_writing_once(const ExperimentConfig& config,
                           const cw::WritingInstance& instance,
                           int instance_index, int repeat,
                           std::uint64_t run_seed);

// ---- reports ------------------------------------------------------------------

nlohmann::json report_success(const std::vector<RunRecord>& records);
nlohmann::json report_diversity(const std::vector<RunRecord>& records);
nlohmann::json report_scores(const std::vector<RunRecord>& records);
nlohmann::json report_cost(const std::vector<RunRecord>& records,
                           const PriceTable& prices);
nlohmann::json report_counters(const std::vector<RunRecord>& records);

struct ReportBundle {
  nlohmann::json doc;
  std::string text;
  std::string csv;
};

ReportBundle build_report(const std::vector<RunRecord>& records,
                          const PriceTable& prices);

// ---- experiment driver ----------------------------------------------------------

struct ExperimentOutput {
  std::vector<RunRecord> records;
  ReportBundle report;
};

/// Executes all (instance x repeat) runs, up to config.parallel at a time.
/// Writes records and the report bundle under config.out_dir when set.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Same, over instances supplied directly instead of a dataset file.
ExperimentOutput run_experiment_game24(
    const ExperimentConfig& config,
    const std::vector<std::array<long long, 4>>& instances);
ExperimentOutput run_experiment_writing(
    const ExperimentConfig& config,
    const std::vector<cw::WritingInstance>& instances);

struct ReplayResult {
  bool identical = false;
  std::string detail;
};

/// Re-executes a stored simulated record and byte-compares the canonical
/// serializations.
ReplayResult replay_record(const nlohmann::json& stored);

// ---- scripted policies -------------------------------------------------------------

/// Policy encoding one correct move per state (weight correct_weight) plus
/// one valid decoy (weight decoy_weight) that leads off-script, and a generic
/// "sure" value rule. Low temperature locks onto the correct path.
nlohmann::json make_game24_policy(
    const std::vector<std::array<long long, 4>>& instances,
    double correct_weight = 2.0, double decoy_weight = 1.0);

/// Plan/vote/write/judge rules per instance; the top-weighted passage
/// candidate satisfies the ending-sentence constraints.
nlohmann::json make_writing_policy(
    const std::vector<cw::WritingInstance>& instances);

// ---- files ------------------------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<RunRecord> load_records_dir(const std::string& dir);

}  // namespace t2ot::bench
