#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "t2ot/bench.hpp"
#include "t2ot/game24.hpp"
#include "t2ot/util.hpp"

using nlohmann::json;
using namespace t2ot;

namespace {

int cmd_run(const std::string& task_str, const std::string& method_str,
            const std::string& config_path, const std::string& dataset,
            std::uint64_t seed, int repeats, const std::string& backend,
            const std::string& policy_arg, const std::string& out_dir,
            int parallel) {
  const auto task = bench::task_from_name(task_str);
  if (!task) {
    std::cerr << "unknown task: " << task_str << "\n";
    return 2;
  }
  const auto method = method_from_name(method_str);
  if (!method) {
    std::cerr << "unknown method: " << method_str << "\n";
    return 2;
  }

  bench::ExperimentConfig config = bench::default_config(*task, *method);
  if (!config_path.empty()) {
    config = bench::ExperimentConfig::from_json(
        json::parse(bench::read_text_file(config_path)));
    config.task = *task;
    config.method = *method;
    config.search.method = *method;
  }
  config.dataset_path = dataset;
  config.seed = seed;
  config.search.seed = seed;
  config.repeats = repeats;
  config.backend = backend;
  config.out_dir = out_dir;
  config.parallel = parallel;

  if (backend == "simulated") {
    if (policy_arg == "auto" || (policy_arg.empty() && !config.policy.is_object())) {
      if (*task == bench::TaskKind::game24) {
        config.policy =
            bench::make_game24_policy(game24::load_instances(dataset));
      } else {
        config.policy =
            bench::make_writing_policy(cw::load_writing_instances(dataset));
      }
    } else if (!policy_arg.empty()) {
      config.policy = json::parse(bench::read_text_file(policy_arg));
    }
  }

  const bench::ExperimentOutput output = bench::run_experiment(config);
  std::cout << output.report.text;
  std::cout << output.records.size() << " run record(s)";
  if (!out_dir.empty()) std::cout << " written under " << out_dir;
  std::cout << "\n";
  return 0;
}

int cmd_report(const std::string& records_dir, const std::string& out_dir,
               double prompt_price, double completion_price) {
  const std::vector<bench::RunRecord> records =
      bench::load_records_dir(records_dir);
  if (records.empty()) {
    std::cerr << "no run records under " << records_dir << "\n";
    return 1;
  }
  PriceTable prices{prompt_price, completion_price};
  const bench::ReportBundle report = bench::build_report(records, prices);
  std::cout << report.text;
  if (!out_dir.empty()) {
    bench::write_text_file(out_dir + "/report.json", report.doc.dump(2) + "\n");
    bench::write_text_file(out_dir + "/report.txt", report.text);
    bench::write_text_file(out_dir + "/report.csv", report.csv);
    std::cout << "report written under " << out_dir << "\n";
  }
  return 0;
}

void print_oracle_line(const std::array<long long, 4>& instance) {
  const auto forms = game24::oracle_solve(instance);
  std::string line;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (i > 0) line += ' ';
    line += std::to_string(instance[i]);
  }
  line += forms.empty() ? " unsolvable" : " solvable";
  line += " types=" + std::to_string(forms.size());
  if (!forms.empty()) {
    line += " forms=";
    bool first = true;
    for (const auto& form : forms) {
      if (!first) line += '|';
      line += form.key;
      first = false;
    }
  }
  std::cout << line << "\n";
}

int cmd_oracle(const std::vector<long long>& numbers,
               const std::string& dataset) {
  if (!dataset.empty()) {
    for (const auto& instance : game24::load_instances(dataset)) {
      print_oracle_line(instance);
    }
    return 0;
  }
  if (numbers.size() != 4) {
    std::cerr << "oracle needs four numbers or --dataset\n";
    return 2;
  }
  print_oracle_line({numbers[0], numbers[1], numbers[2], numbers[3]});
  return 0;
}

int cmd_verify(const std::string& expression,
               const std::vector<long long>& numbers) {
  if (numbers.size() != 4) {
    std::cerr << "verify needs an expression and four numbers\n";
    return 2;
  }
  std::string error;
  const auto expr = game24::parse_expression(expression, &error);
  if (!expr) {
    std::cout << "parse error: " << error << "\n";
    return 1;
  }
  const bool ok = game24::verify_expression(
      *expr, {numbers[0], numbers[1], numbers[2], numbers[3]});
  std::cout << (ok ? "verified" : "not a solution") << "\n";
  return ok ? 0 : 1;
}

int cmd_replay(const std::string& record_path) {
  const json stored = json::parse(bench::read_text_file(record_path));
  const bench::ReplayResult result = bench::replay_record(stored);
  std::cout << (result.identical ? "identical" : "MISMATCH: " + result.detail)
            << "\n";
  return result.identical ? 0 : 1;
}

int cmd_gen_dataset(const std::string& task_str, int count, std::uint64_t seed,
                    const std::string& out_path, long long min_value,
                    long long max_value, bool allow_unsolvable) {
  const auto task = bench::task_from_name(task_str);
  if (!task) {
    std::cerr << "unknown task: " << task_str << "\n";
    return 2;
  }
  std::string text;
  if (*task == bench::TaskKind::game24) {
    const auto instances = game24::generate_instances(
        count, seed, min_value, max_value, !allow_unsolvable);
    for (const auto& inst : instances) {
      for (std::size_t i = 0; i < inst.size(); ++i) {
        text += std::to_string(inst[i]);
        text += (i + 1 < inst.size()) ? ' ' : '\n';
      }
    }
  } else {
    text = cw::writing_instances_text(cw::generate_writing_instances(count, seed));
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    bench::write_text_file(out_path, text);
    std::cout << count << " instance(s) written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-of-thoughts benchmark harness with swarm-driven "
               "temperature control"};
  app.require_subcommand(1);

  // run
  std::string task = "game24";
  std::string method = "t2ot";
  std::string config_path;
  std::string dataset;
  std::uint64_t seed = 0;
  int repeats = 1;
  std::string backend = "simulated";
  std::string policy;
  std::string out_dir;
  int parallel = 1;
  auto* run = app.add_subcommand("run", "Execute an experiment batch");
  run->add_option("--task", task, "game24 | creative-writing");
  run->add_option("--method", method, "io | cot | tot | tot-random | t2ot");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--dataset", dataset, "instance file")->required();
  run->add_option("--seed", seed, "batch seed");
  run->add_option("--repeats", repeats, "runs per instance");
  run->add_option("--backend", backend, "simulated | http");
  run->add_option("--policy", policy,
                  "scripted policy JSON, or 'auto' to derive one from the "
                  "dataset");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--parallel", parallel, "concurrent runs");

  // report
  std::string records_dir;
  std::string report_out;
  double prompt_price = 0.01;
  double completion_price = 0.03;
  auto* report =
      app.add_subcommand("report", "Rebuild reports from stored records");
  report->add_option("--records", records_dir, "records directory")->required();
  report->add_option("--out", report_out, "output directory");
  report->add_option("--prompt-price", prompt_price, "per 1k prompt tokens");
  report->add_option("--completion-price", completion_price,
                     "per 1k generated tokens");

  // oracle
  std::vector<long long> oracle_numbers;
  std::string oracle_dataset;
  auto* oracle = app.add_subcommand(
      "oracle", "Enumerate canonical 24-solutions for instances");
  oracle->add_option("numbers", oracle_numbers, "four integers");
  oracle->add_option("--dataset", oracle_dataset, "instance file");

  // verify
  std::string verify_expr;
  std::vector<long long> verify_numbers;
  auto* verify =
      app.add_subcommand("verify", "Check an expression against an instance");
  verify->add_option("expression", verify_expr, "arithmetic expression")
      ->required();
  verify->add_option("numbers", verify_numbers, "four integers")->required();

  // replay
  std::string record_path;
  auto* replay = app.add_subcommand(
      "replay", "Re-execute a stored simulated run and compare bytes");
  replay->add_option("record", record_path, "run record JSON")->required();

  // gen-dataset
  std::string gen_task = "game24";
  int gen_count = 50;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  long long gen_min = 1;
  long long gen_max = 13;
  bool allow_unsolvable = false;
  auto* gen = app.add_subcommand("gen-dataset", "Generate an instance file");
  gen->add_option("--task", gen_task, "game24 | creative-writing");
  gen->add_option("--count", gen_count, "instances to generate");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");
  gen->add_option("--min", gen_min, "minimum value (game24)");
  gen->add_option("--max", gen_max, "maximum value (game24)");
  gen->add_flag("--allow-unsolvable", allow_unsolvable,
                "skip the solvability filter (game24)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(task, method, config_path, dataset, seed, repeats,
                     backend, policy, out_dir, parallel);
    }
    if (report->parsed()) {
      return cmd_report(records_dir, report_out, prompt_price,
                        completion_price);
    }
    if (oracle->parsed()) return cmd_oracle(oracle_numbers, oracle_dataset);
    if (verify->parsed()) return cmd_verify(verify_expr, verify_numbers);
    if (replay->parsed()) return cmd_replay(record_path);
    if (gen->parsed()) {
      return cmd_gen_dataset(gen_task, gen_count, gen_seed, gen_out, gen_min,
                             gen_max, allow_unsolvable);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
