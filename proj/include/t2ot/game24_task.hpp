#pragma once

#include <array>

#include "t2ot/game24.hpp"
#include "t2ot/search.hpp"

namespace t2ot::game24 {

/// Engine adapter for one Game-of-24 instance. Node content is the
/// newline-joined normalized trace ("a op b = c (left: ...)" per line);
/// the root content is empty.
class Game24Task final : public Task {
 public:
  explicit Game24Task(const std::array<long long, 4>& origin,
                      ValueMapping mapping = {})
      : origin_(origin), mapping_(mapping) {}

  std::string name() const override { return "game24"; }
  std::string root_content() const override { return ""; }
  bool is_terminal(const std::string& content) const override;
  std::string propose_prompt(const std::string& content) const override;
  std::string value_prompt(const std::string& content) const override;
  ProposalOutcome parse_proposals(const std::string& content,
                                  const std::string& response) const override;
  ValueOutcome parse_value(const std::string& response) const override;
  std::string io_prompt() const override;
  std::string cot_prompt() const override;
  Verdict verdict_from_text(const std::string& answer_text) const override;
  Verdict verdict_from_nodes(
      const std::vector<ThoughtNode>& final_beam) const override;

  const std::array<long long, 4>& origin() const { return origin_; }

 private:
  std::array<long long, 4> origin_;
  ValueMapping mapping_;
};

}  // namespace t2ot::game24
