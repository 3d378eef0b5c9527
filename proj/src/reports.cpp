#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "t2ot/bench.hpp"
#include "t2ot/util.hpp"

namespace t2ot::bench {

using nlohmann::json;

namespace {

std::array<long long, 4> record_numbers(const RunRecord& record) {
  const auto numbers =
      record.doc.at("instance").at("numbers").get<std::vector<long long>>();
  return {numbers.at(0), numbers.at(1), numbers.at(2), numbers.at(3)};
}

// Success is always recomputed from the transcript's answer expression;
// stored flags are never trusted.
bool recomputed_success(const RunRecord& record) {
  const std::string answer =
      record.transcript().at("verdict").value("answer", "");
  if (answer.empty()) return false;
  return game24::verify_text(answer, record_numbers(record));
}

std::vector<std::string> method_order(const std::vector<RunRecord>& records) {
  std::vector<std::string> order;
  for (const RunRecord& r : records) {
    const std::string m = r.method();
    if (std::find(order.begin(), order.end(), m) == order.end()) {
      order.push_back(m);
    }
  }
  return order;
}

}  // namespace

json report_success(const std::vector<RunRecord>& records) {
  std::map<std::string, std::pair<int, int>> tally;  // method -> {runs, verified}
  std::vector<std::string> order;
  for (const RunRecord& r : records) {
    if (r.task() != "game24") continue;
    const std::string m = r.method();
    if (!tally.count(m)) order.push_back(m);
    auto& [runs, verified] = tally[m];
    runs += 1;
    if (recomputed_success(r)) verified += 1;
  }
  json rows = json::array();
  for (const std::string& m : order) {
    const auto& [runs, verified] = tally[m];
    const double rate = runs > 0 ? 100.0 * verified / runs : 0.0;
    rows.push_back({{"method", m},
                    {"runs", runs},
                    {"verified", verified},
                    {"rate_percent", rate},
                    {"display", format_fixed(rate, 1) + "%"}});
  }
  return {{"rows", rows}};
}

json report_diversity(const std::vector<RunRecord>& records) {
  struct Bucket {
    std::array<long long, 4> numbers{};
    std::string method;
    std::vector<std::string> solved_answers;
    int runs = 0;
  };
  std::map<std::string, Bucket> buckets;
  std::vector<std::string> order;
  for (const RunRecord& r : records) {
    if (r.task() != "game24") continue;
    const auto numbers = record_numbers(r);
    std::string key = r.method() + "|";
    for (long long v : numbers) key += std::to_string(v) + " ";
    if (!buckets.count(key)) order.push_back(key);
    Bucket& b = buckets[key];
    b.numbers = numbers;
    b.method = r.method();
    b.runs += 1;
    if (recomputed_success(r)) {
      b.solved_answers.push_back(
          r.transcript().at("verdict").value("answer", ""));
    }
  }
  json rows = json::array();
  for (const std::string& key : order) {
    const Bucket& b = buckets[key];
    const auto diversity = game24::solution_diversity(b.solved_answers);
    json types = json::array();
    json freqs = json::array();
    for (const auto& row : diversity) {
      // Frequencies are over all runs; failed runs stay in the denominator.
      const double freq = b.runs > 0
                              ? static_cast<double>(row.count) / b.runs
                              : 0.0;
      freqs.push_back(freq);
      types.push_back({{"key", row.key},
                       {"count", row.count},
                       {"frequency", freq},
                       {"representative", row.representative}});
    }
    rows.push_back({{"method", b.method},
                    {"numbers", std::vector<long long>(b.numbers.begin(),
                                                       b.numbers.end())},
                    {"runs", b.runs},
                    {"solved", static_cast<int>(b.solved_answers.size())},
                    {"failed",
                     b.runs - static_cast<int>(b.solved_answers.size())},
                    {"type_count", static_cast<int>(diversity.size())},
                    {"frequencies", freqs},
                    {"types", types}});
  }
  return {{"rows", rows}};
}

json report_scores(const std::vector<RunRecord>& records) {
  std::map<std::string, std::vector<double>> scores;
  std::vector<std::string> order;
  for (const RunRecord& r : records) {
    if (r.task() != "creative-writing") continue;
    const std::string m = r.method();
    if (!scores.count(m)) order.push_back(m);
    scores[m].push_back(r.transcript().at("verdict").value("score", 0.0));
  }
  json rows = json::array();
  for (const std::string& m : order) {
    const std::vector<double>& xs = scores[m];
    const int n = static_cast<int>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double std_dev = 0.0;
    bool flagged = false;
    if (n > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      std_dev = std::sqrt(ss / (n - 1));
    } else {
      flagged = true;  // sample std undefined for one run
    }
    rows.push_back({{"method", m},
                    {"runs", n},
                    {"mean", mean},
                    {"std", std_dev},
                    {"display", format_fixed(mean, 2) + " ± " +
                                    format_fixed(std_dev, 2)},
                    {"flagged", flagged}});
  }
  return {{"rows", rows}};
}

json report_cost(const std::vector<RunRecord>& records,
                 const PriceTable& prices) {
  struct Tally {
    long long prompt = 0;
    long long completion = 0;
    int cases = 0;
    long long estimated = 0;
  };
  std::map<std::string, Tally> tallies;
  std::vector<std::string> order;
  for (const RunRecord& r : records) {
    const std::string m = r.method();
    if (!tallies.count(m)) order.push_back(m);
    Tally& t = tallies[m];
    const json& total = r.transcript().at("usage").at("total");
    t.prompt += total.value("prompt_tokens", 0LL);
    t.completion += total.value("completion_tokens", 0LL);
    t.estimated += total.value("estimated_responses", 0LL);
    t.cases += 1;
  }
  json rows = json::array();
  for (const std::string& m : order) {
    const Tally& t = tallies[m];
    const double avg_prompt = t.cases ? static_cast<double>(t.prompt) / t.cases : 0.0;
    const double avg_completion =
        t.cases ? static_cast<double>(t.completion) / t.cases : 0.0;
    // Cost is always tokens x configured prices, never a copied constant.
    const double cost = avg_prompt / 1000.0 * prices.prompt_per_1k +
                        avg_completion / 1000.0 * prices.completion_per_1k;
    rows.push_back({{"method", m},
                    {"cases", t.cases},
                    {"avg_generate_tokens", avg_completion},
                    {"avg_prompt_tokens", avg_prompt},
                    {"tokens_display",
                     format_kilo(avg_completion) + " / " + format_kilo(avg_prompt)},
                    {"cost_per_case", cost},
                    {"estimated_responses", t.estimated}});
  }
  return {{"rows", rows},
          {"prices",
           {{"prompt_per_1k", prices.prompt_per_1k},
            {"completion_per_1k", prices.completion_per_1k}}}};
}

json report_counters(const std::vector<RunRecord>& records) {
  static const char* kKeys[] = {"dropped_proposals", "value_fallbacks",
                                "vote_discards", "judge_fallbacks",
                                "judge_clamps"};
  std::map<std::string, std::map<std::string, long long>> tallies;
  const std::vector<std::string> order = method_order(records);
  for (const RunRecord& r : records) {
    auto& t = tallies[r.method()];
    const json& counters = r.transcript().at("counters");
    for (const char* key : kKeys) t[key] += counters.value(key, 0LL);
    if (r.transcript().value("incomplete", false)) t["incomplete_runs"] += 1;
  }
  json rows = json::array();
  for (const std::string& m : order) {
    json row = {{"method", m}};
    for (const char* key : kKeys) row[key] = tallies[m][key];
    row["incomplete_runs"] = tallies[m]["incomplete_runs"];
    rows.push_back(row);
  }
  return {{"rows", rows}};
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  while (out.size() < width) out += ' ';
  return out;
}

void render_table(std::ostringstream& out, const std::string& title,
                  const std::vector<std::string>& headers,
                  const std::vector<std::vector<std::string>>& cells) {
  out << "== " << title << " ==\n";
  if (cells.empty()) {
    out << "(no records)\n\n";
    return;
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  for (std::size_t c = 0; c < headers.size(); ++c) {
    out << pad(headers[c], widths[c] + 2);
  }
  out << "\n";
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << pad(row[c], widths[c] + 2);
    }
    out << "\n";
  }
  out << "\n";
}

void render_csv(std::ostringstream& out, const std::string& table,
                const std::vector<std::string>& headers,
                const std::vector<std::vector<std::string>>& cells) {
  out << "table,";
  for (std::size_t c = 0; c < headers.size(); ++c) {
    out << headers[c] << (c + 1 < headers.size() ? "," : "\n");
  }
  for (const auto& row : cells) {
    out << table << ",";
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      if (cell.find(',') != std::string::npos) cell = "\"" + cell + "\"";
      out << cell << (c + 1 < row.size() ? "," : "\n");
    }
  }
}

std::string freq_list(const json& freqs) {
  std::string out = "(";
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_fixed(freqs[i].get<double>(), 2);
  }
  out += ")";
  return out;
}

}  // namespace

ReportBundle build_report(const std::vector<RunRecord>& records,
                          const PriceTable& prices) {
  ReportBundle bundle;
  bundle.doc = {{"success", report_success(records)},
                {"diversity", report_diversity(records)},
                {"scores", report_scores(records)},
                {"cost", report_cost(records, prices)},
                {"counters", report_counters(records)},
                {"record_count", records.size()}};

  std::ostringstream text;
  std::ostringstream csv;

  {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : bundle.doc["success"]["rows"]) {
      cells.push_back({row["method"].get<std::string>(),
                       std::to_string(row["runs"].get<int>()),
                       std::to_string(row["verified"].get<int>()),
                       row["display"].get<std::string>()});
    }
    const std::vector<std::string> headers = {"method", "runs", "verified",
                                              "success"};
    render_table(text, "Success rates", headers, cells);
    render_csv(csv, "success", headers, cells);
  }
  {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : bundle.doc["diversity"]["rows"]) {
      std::string numbers;
      for (const auto& v : row["numbers"]) {
        if (!numbers.empty()) numbers += ' ';
        numbers += std::to_string(v.get<long long>());
      }
      std::string reps;
      for (const auto& type : row["types"]) {
        if (!reps.empty()) reps += " | ";
        reps += type["representative"].get<std::string>();
      }
      cells.push_back({row["method"].get<std::string>(), numbers,
                       std::to_string(row["runs"].get<int>()),
                       std::to_string(row["solved"].get<int>()),
                       std::to_string(row["type_count"].get<int>()),
                       freq_list(row["frequencies"]), reps});
    }
    const std::vector<std::string> headers = {
        "method", "instance", "runs", "solved", "types", "frequencies",
        "representatives"};
    render_table(text, "Solution diversity", headers, cells);
    render_csv(csv, "diversity", headers, cells);
  }
  {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : bundle.doc["scores"]["rows"]) {
      cells.push_back({row["method"].get<std::string>(),
                       std::to_string(row["runs"].get<int>()),
                       row["display"].get<std::string>()});
    }
    const std::vector<std::string> headers = {"method", "runs",
                                              "score (mean +/- std)"};
    render_table(text, "Coherency scores", headers, cells);
    render_csv(csv, "scores", headers, cells);
  }
  {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : bundle.doc["cost"]["rows"]) {
      cells.push_back({row["method"].get<std::string>(),
                       std::to_string(row["cases"].get<int>()),
                       row["tokens_display"].get<std::string>(),
                       format_fixed(row["cost_per_case"].get<double>(), 2)});
    }
    const std::vector<std::string> headers = {"method", "cases",
                                              "generate/prompt tokens",
                                              "cost per case"};
    render_table(text, "Token cost", headers, cells);
    render_csv(csv, "cost", headers, cells);
  }
  {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : bundle.doc["counters"]["rows"]) {
      cells.push_back(
          {row["method"].get<std::string>(),
           std::to_string(row["dropped_proposals"].get<long long>()),
           std::to_string(row["value_fallbacks"].get<long long>()),
           std::to_string(row["vote_discards"].get<long long>()),
           std::to_string(row["judge_fallbacks"].get<long long>()),
           std::to_string(row["judge_clamps"].get<long long>()),
           std::to_string(row["incomplete_runs"].get<long long>())});
    }
    const std::vector<std::string> headers = {
        "method",          "dropped_proposals", "value_fallbacks",
        "vote_discards",   "judge_fallbacks",   "judge_clamps",
        "incomplete_runs"};
    render_table(text, "Fallback and drop counters", headers, cells);
    render_csv(csv, "counters", headers, cells);
  }

  bundle.text = text.str();
  bundle.csv = csv.str();
  return bundle;
}

}  // namespace t2ot::bench
