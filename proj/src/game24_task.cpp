#include "t2ot/game24_task.hpp"

#include <algorithm>

#include "t2ot/util.hpp"

namespace t2ot::game24 {

namespace {

Game24State state_or_initial(const std::array<long long, 4>& origin,
                             const std::string& content) {
  auto state = state_from_content(origin, content);
  // Engine-produced content always replays; fall back defensively anyway.
  return state ? *state : initial_state(origin);
}

}  // namespace

bool Game24Task::is_terminal(const std::string& content) const {
  return state_or_initial(origin_, content).terminal();
}

std::string Game24Task::propose_prompt(const std::string& content) const {
  return game24::propose_prompt(state_or_initial(origin_, content));
}

std::string Game24Task::value_prompt(const std::string& content) const {
  return game24::value_prompt(state_or_initial(origin_, content));
}

ProposalOutcome Game24Task::parse_proposals(const std::string& content,
                                            const std::string& response) const {
  const Game24State state = state_or_initial(origin_, content);
  ProposalOutcome out;
  for (const std::string& line : split_lines(response)) {
    if (trim(line).empty()) continue;
    ProposalParse parsed = parse_proposal(state, line);
    if (!parsed.next) {
      out.dropped += 1;
      out.drop_reasons[reject_name(parsed.reject)] += 1;
      continue;
    }
    std::string child = content;
    if (!child.empty()) child += '\n';
    child += parsed.next->trace.back().line;
    out.children.push_back(std::move(child));
  }
  return out;
}

ValueOutcome Game24Task::parse_value(const std::string& response) const {
  const ValueClassification c = classify_value(response);
  return {value_to_score(c.label, mapping_), c.fallback};
}

std::string Game24Task::io_prompt() const { return game24::io_prompt(origin_); }

std::string Game24Task::cot_prompt() const {
  return game24::cot_prompt(origin_);
}

Verdict Game24Task::verdict_from_text(const std::string& answer_text) const {
  Verdict v;
  ExprPtr expr = answer_from_text(answer_text);
  if (!expr) return v;
  v.answer = render(*expr);
  v.success = verify_expression(*expr, origin_);
  v.score = v.success ? 1.0 : 0.0;
  return v;
}

Verdict Game24Task::verdict_from_nodes(
    const std::vector<ThoughtNode>& final_beam) const {
  std::vector<ThoughtNode> ordered = final_beam;
  std::sort(ordered.begin(), ordered.end(),
            [](const ThoughtNode& a, const ThoughtNode& b) {
              const double va = a.value.value_or(0.0);
              const double vb = b.value.value_or(0.0);
              if (va != vb) return va > vb;
              return a.id < b.id;
            });
  Verdict v;
  for (const ThoughtNode& node : ordered) {
    const auto state = state_from_content(origin_, node.content);
    if (!state || !state->terminal()) continue;
    ExprPtr expr = expression_from_trace(*state);
    if (!expr) continue;
    if (verify_expression(*expr, origin_)) {
      v.success = true;
      v.answer = render(*expr);
      v.score = 1.0;
      return v;
    }
    if (v.answer.empty()) v.answer = render(*expr);  // best unverified attempt
  }
  return v;
}

}  // namespace t2ot::game24
