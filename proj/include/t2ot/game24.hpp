#pragma once

/**
 * Game of 24 task: combine four input numbers with + - * / so the result is
 * exactly 24. All arithmetic is exact-rational; there is no floating-point
 * acceptance window anywhere in the verifier or the oracle.
 */

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace t2ot::game24 {

// ---- exact rational arithmetic ---------------------------------------------

/// Normalized rational: den > 0, gcd(|num|, den) == 1.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);  // throws on d == 0
  static Rational integer(long long v) { return Rational(v, 1); }

  bool is_integer() const { return den == 1; }
  std::string str() const;  // "5" or "8/3"

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b);
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
/// nullopt when b == 0.
std::optional<Rational> divide(const Rational& a, const Rational& b);

/// Parses "12", "-3" or "8/3". nullopt on anything else.
std::optional<Rational> parse_rational(const std::string& text);

// ---- expressions ------------------------------------------------------------

enum class Op { add, sub, mul, divide };

char op_symbol(Op op);

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

/// Leaf (an input number) or binary node.
struct Expression {
  std::optional<Op> op;       // nullopt => leaf
  long long leaf_value = 0;
  ExprPtr lhs;
  ExprPtr rhs;
};

ExprPtr make_leaf(long long value);
ExprPtr make_node(Op op, ExprPtr lhs, ExprPtr rhs);

/// Exact value; nullopt if any division by zero occurs.
std::optional<Rational> evaluate(const Expression& expr);

/// Leaf values in sorted order (the multiset of inputs used).
std::vector<long long> leaf_values(const Expression& expr);

/// Fully parenthesized infix rendering.
std::string render(const Expression& expr);

/// Infix parser over integers, + - * / and parentheses.
/// Returns nullptr on syntax errors (reason in *error when given).
ExprPtr parse_expression(const std::string& text, std::string* error = nullptr);

/// True iff the expression uses exactly the origin multiset and evaluates to
/// 24 exactly. Division by zero makes it false, never an exception.
bool verify_expression(const Expression& expr,
                       const std::array<long long, 4>& origin);
bool verify_text(const std::string& text, const std::array<long long, 4>& origin);

// ---- canonical solution classes ---------------------------------------------

/// Equivalence class key under commutative operand sorting of + and * plus
/// flattening of same-operator associative chains. No distributivity and no
/// inverse rewrites, so "7-5" and "5-7" stay distinct.
struct CanonicalForm {
  std::string key;

  friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
    return a.key == b.key;
  }
  friend bool operator<(const CanonicalForm& a, const CanonicalForm& b) {
    return a.key < b.key;
  }
};

CanonicalForm canonicalize(const Expression& expr);

/// Exhaustive enumeration over operand orders, operator assignments and the
/// five binary tree shapes on four leaves; exact arithmetic throughout.
/// Empty set means unsolvable.
std::set<CanonicalForm> oracle_solve(const std::array<long long, 4>& origin);

/// True iff some arrangement of the values reaches 24 exactly.
bool reachable_24(std::vector<Rational> values);

// ---- search-state handling ---------------------------------------------------

struct Operation {
  Rational a;
  Rational b;
  Op op = Op::add;
  Rational result;
  std::string line;  // normalized "a op b = c (left: ...)" text
};

struct Game24State {
  std::array<long long, 4> origin{};
  std::vector<Rational> remaining;
  std::vector<Operation> trace;

  bool terminal() const { return remaining.size() <= 1; }
  std::string remaining_text() const;  // "2 2 6" in working order
};

Game24State initial_state(const std::array<long long, 4>& origin);

/// Node content is the newline-joined trace; this replays it from origin.
/// nullopt when the content does not replay cleanly.
std::optional<Game24State> state_from_content(
    const std::array<long long, 4>& origin, const std::string& content);

enum class ProposalReject {
  none,
  malformed,
  operand_missing,
  arithmetic_mismatch,
  division_by_zero,
};

const char* reject_name(ProposalReject r);

struct ProposalParse {
  std::optional<Game24State> next;
  ProposalReject reject = ProposalReject::none;
};

/// Accepts "a op b = c (left: ...)" where a and b are members of
/// state.remaining and c is exactly a op b. The left-list in the text is
/// never trusted; the remaining multiset is recomputed.
ProposalParse parse_proposal(const Game24State& state, const std::string& line);

// ---- model-output interpretation ----------------------------------------------

enum class ValueLabel { sure, maybe, impossible };

struct ValueClassification {
  ValueLabel label = ValueLabel::maybe;
  bool fallback = false;  // no keyword found, defaulted to maybe
};

/// Last occurring keyword wins; no keyword falls back to maybe (flagged).
ValueClassification classify_value(const std::string& text);

struct ValueMapping {
  double sure = 1.0;
  double maybe = 0.5;
  double impossible = 0.0;
};

double value_to_score(ValueLabel label, const ValueMapping& mapping = {});

/// Rebuilds the answer expression from a completed trace (3 operations).
/// nullptr when the trace is incomplete.
ExprPtr expression_from_trace(const Game24State& state);

/// Pulls an expression out of free-form answer text: the segment after the
/// last "answer" marker, cut at '=' when present; otherwise the whole text.
ExprPtr answer_from_text(const std::string& text);

// ---- prompts -------------------------------------------------------------------

std::string propose_prompt(const Game24State& state);
std::string value_prompt(const Game24State& state);
std::string io_prompt(const std::array<long long, 4>& origin);
std::string cot_prompt(const std::array<long long, 4>& origin);

// ---- dataset / diversity --------------------------------------------------------

/// One instance per line: four space-separated integers. Blank lines are
/// skipped; anything else throws std::runtime_error.
std::vector<std::array<long long, 4>> load_instances(const std::string& path);
std::vector<std::array<long long, 4>> parse_instances(const std::string& text);

/// Seeded generator over values in [min_value, max_value]; when solvable_only
/// is set each emitted instance is checked against the oracle.
std::vector<std::array<long long, 4>> generate_instances(
    int count, std::uint64_t seed, long long min_value = 1,
    long long max_value = 13, bool solvable_only = true);

struct DiversityRow {
  std::string key;
  int count = 0;
  double frequency = 0.0;
  std::string representative;
};

/// Canonical-form histogram over verified expressions, descending frequency.
std::vector<DiversityRow> solution_diversity(
    const std::vector<std::string>& expressions);

}  // namespace t2ot::game24
