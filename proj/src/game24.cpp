#include "t2ot/game24.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "t2ot/util.hpp"

namespace t2ot::game24 {

// ---- Rational ---------------------------------------------------------------

namespace {

long long gcd_ll(long long a, long long b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  return std::gcd(a, b);
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = gcd_ll(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

bool operator<(const Rational& a, const Rational& b) {
  // Small operands throughout; the cross product fits comfortably.
  return a.num * b.den < b.num * a.den;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}

std::optional<Rational> divide(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  return Rational(a.num * b.den, a.den * b.num);
}

std::optional<Rational> parse_rational(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (t[i] == '-') {
    neg = true;
    ++i;
  }
  if (i >= t.size() || !std::isdigit(static_cast<unsigned char>(t[i]))) {
    return std::nullopt;
  }
  long long num = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
    num = num * 10 + (t[i] - '0');
    ++i;
  }
  long long den = 1;
  if (i < t.size() && t[i] == '/') {
    ++i;
    if (i >= t.size() || !std::isdigit(static_cast<unsigned char>(t[i]))) {
      return std::nullopt;
    }
    den = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
      den = den * 10 + (t[i] - '0');
      ++i;
    }
    if (den == 0) return std::nullopt;
  }
  if (i != t.size()) return std::nullopt;
  return Rational(neg ? -num : num, den);
}

// ---- expressions --------------------------------------------------------------

char op_symbol(Op op) {
  switch (op) {
    case Op::add: return '+';
    case Op::sub: return '-';
    case Op::mul: return '*';
    case Op::divide: return '/';
  }
  return '?';
}

ExprPtr make_leaf(long long value) {
  auto e = std::make_shared<Expression>();
  e->leaf_value = value;
  return e;
}

ExprPtr make_node(Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expression>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

std::optional<Rational> evaluate(const Expression& expr) {
  if (!expr.op) return Rational::integer(expr.leaf_value);
  const auto l = evaluate(*expr.lhs);
  const auto r = evaluate(*expr.rhs);
  if (!l || !r) return std::nullopt;
  switch (*expr.op) {
    case Op::add: return *l + *r;
    case Op::sub: return *l - *r;
    case Op::mul: return *l * *r;
    case Op::divide: return divide(*l, *r);
  }
  return std::nullopt;
}

std::vector<long long> leaf_values(const Expression& expr) {
  std::vector<long long> out;
  const auto walk = [&out](auto&& self, const Expression& e) -> void {
    if (!e.op) {
      out.push_back(e.leaf_value);
      return;
    }
    self(self, *e.lhs);
    self(self, *e.rhs);
  };
  walk(walk, expr);
  std::sort(out.begin(), out.end());
  return out;
}

std::string render(const Expression& expr) {
  if (!expr.op) return std::to_string(expr.leaf_value);
  return "(" + render(*expr.lhs) + op_symbol(*expr.op) + render(*expr.rhs) + ")";
}

namespace {

// Recursive-descent infix parser.
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := integer | '(' expr ')'
struct ExprParser {
  const std::string& text;
  std::size_t pos = 0;
  std::string error;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  ExprPtr fail(const std::string& why) {
    if (error.empty()) error = why + " at position " + std::to_string(pos);
    return nullptr;
  }

  ExprPtr parse_factor() {
    skip_ws();
    if (pos >= text.size()) return fail("unexpected end of input");
    if (text[pos] == '(') {
      ++pos;
      ExprPtr inner = parse_expr();
      if (!inner) return nullptr;
      if (!eat(')')) return fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      long long v = 0;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos] - '0');
        ++pos;
      }
      return make_leaf(v);
    }
    return fail("expected number or '('");
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    if (!lhs) return nullptr;
    for (;;) {
      skip_ws();
      if (pos < text.size() && (text[pos] == '*' || text[pos] == '/')) {
        const Op op = text[pos] == '*' ? Op::mul : Op::divide;
        ++pos;
        ExprPtr rhs = parse_factor();
        if (!rhs) return nullptr;
        lhs = make_node(op, std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    if (!lhs) return nullptr;
    for (;;) {
      skip_ws();
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const Op op = text[pos] == '+' ? Op::add : Op::sub;
        ++pos;
        ExprPtr rhs = parse_term();
        if (!rhs) return nullptr;
        lhs = make_node(op, std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& text, std::string* error) {
  ExprParser parser{text, 0, {}};
  ExprPtr e = parser.parse_expr();
  if (e) {
    parser.skip_ws();
    if (parser.pos != text.size()) {
      e = parser.fail("trailing input");
    }
  }
  if (!e && error) *error = parser.error;
  return e;
}

bool verify_expression(const Expression& expr,
                       const std::array<long long, 4>& origin) {
  std::vector<long long> want(origin.begin(), origin.end());
  std::sort(want.begin(), want.end());
  if (leaf_values(expr) != want) return false;
  const auto value = evaluate(expr);
  return value && *value == Rational::integer(24);
}

bool verify_text(const std::string& text,
                 const std::array<long long, 4>& origin) {
  ExprPtr e = parse_expression(text);
  return e && verify_expression(*e, origin);
}

// ---- canonicalization ----------------------------------------------------------

namespace {

std::string canon_key_of(const Expression& e);

void collect_operands(const Expression& e, Op op,
                      std::vector<std::string>& parts) {
  if (e.op && *e.op == op) {
    collect_operands(*e.lhs, op, parts);
    collect_operands(*e.rhs, op, parts);
  } else {
    parts.push_back(canon_key_of(e));
  }
}

std::string canon_key_of(const Expression& e) {
  if (!e.op) return std::to_string(e.leaf_value);
  const Op op = *e.op;
  if (op == Op::add || op == Op::mul) {
    std::vector<std::string> parts;
    collect_operands(e, op, parts);
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += op_symbol(op);
      out += parts[i];
    }
    out += ")";
    return out;
  }
  return "(" + canon_key_of(*e.lhs) + op_symbol(op) + canon_key_of(*e.rhs) + ")";
}

}  // namespace

CanonicalForm canonicalize(const Expression& expr) {
  return CanonicalForm{canon_key_of(expr)};
}

// ---- oracle ---------------------------------------------------------------------

namespace {

ExprPtr build_shape(int shape, const std::array<ExprPtr, 4>& l,
                    const std::array<Op, 3>& o) {
  switch (shape) {
    case 0:
      return make_node(o[2], make_node(o[1], make_node(o[0], l[0], l[1]), l[2]),
                       l[3]);
    case 1:
      return make_node(o[2], make_node(o[0], l[0], make_node(o[1], l[1], l[2])),
                       l[3]);
    case 2:
      return make_node(o[0], l[0],
                       make_node(o[2], make_node(o[1], l[1], l[2]), l[3]));
    case 3:
      return make_node(o[0], l[0],
                       make_node(o[1], l[1], make_node(o[2], l[2], l[3])));
    default:
      return make_node(o[1], make_node(o[0], l[0], l[1]),
                       make_node(o[2], l[2], l[3]));
  }
}

}  // namespace

std::set<CanonicalForm> oracle_solve(const std::array<long long, 4>& origin) {
  static const std::array<Op, 4> kOps = {Op::add, Op::sub, Op::mul, Op::divide};
  std::set<CanonicalForm> out;
  std::array<long long, 4> values = origin;
  std::sort(values.begin(), values.end());
  do {
    const std::array<ExprPtr, 4> leaves = {
        make_leaf(values[0]), make_leaf(values[1]), make_leaf(values[2]),
        make_leaf(values[3])};
    for (Op o0 : kOps) {
      for (Op o1 : kOps) {
        for (Op o2 : kOps) {
          for (int shape = 0; shape < 5; ++shape) {
            ExprPtr e = build_shape(shape, leaves, {o0, o1, o2});
            const auto v = evaluate(*e);
            if (v && *v == Rational::integer(24)) {
              out.insert(canonicalize(*e));
            }
          }
        }
      }
    }
  } while (std::next_permutation(values.begin(), values.end()));
  return out;
}

bool reachable_24(std::vector<Rational> values) {
  if (values.empty()) return false;
  if (values.size() == 1) return values[0] == Rational::integer(24);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      std::vector<Rational> rest;
      rest.reserve(values.size() - 1);
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (k != i && k != j) rest.push_back(values[k]);
      }
      const Rational a = values[i];
      const Rational b = values[j];
      std::vector<Rational> combos = {a + b, a * b, a - b, b - a};
      if (const auto q = divide(a, b)) combos.push_back(*q);
      if (const auto q = divide(b, a)) combos.push_back(*q);
      for (const Rational& c : combos) {
        rest.push_back(c);
        if (reachable_24(rest)) return true;
        rest.pop_back();
      }
    }
  }
  return false;
}

// ---- search state ------------------------------------------------------------------

std::string Game24State::remaining_text() const {
  std::string out;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (i > 0) out += ' ';
    out += remaining[i].str();
  }
  return out;
}

Game24State initial_state(const std::array<long long, 4>& origin) {
  Game24State s;
  s.origin = origin;
  for (long long v : origin) s.remaining.push_back(Rational::integer(v));
  return s;
}

std::optional<Game24State> state_from_content(
    const std::array<long long, 4>& origin, const std::string& content) {
  Game24State state = initial_state(origin);
  for (const std::string& line : split_lines(content)) {
    if (trim(line).empty()) continue;
    ProposalParse parsed = parse_proposal(state, line);
    if (!parsed.next) return std::nullopt;
    state = std::move(*parsed.next);
  }
  return state;
}

const char* reject_name(ProposalReject r) {
  switch (r) {
    case ProposalReject::none: return "none";
    case ProposalReject::malformed: return "malformed";
    case ProposalReject::operand_missing: return "operand_missing";
    case ProposalReject::arithmetic_mismatch: return "arithmetic_mismatch";
    case ProposalReject::division_by_zero: return "division_by_zero";
  }
  return "unknown";
}

namespace {

struct LineScanner {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  std::optional<Rational> rational() {
    skip_ws();
    std::size_t start = i;
    if (i < s.size() && s[i] == '-') ++i;
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) {
      i = start;
      return std::nullopt;
    }
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == '/' && i + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    return parse_rational(s.substr(start, i - start));
  }

  std::optional<Op> op() {
    skip_ws();
    if (i >= s.size()) return std::nullopt;
    switch (s[i]) {
      case '+': ++i; return Op::add;
      case '-': ++i; return Op::sub;
      case '*': ++i; return Op::mul;
      case 'x':
      case 'X': ++i; return Op::mul;
      case '/': ++i; return Op::divide;
      default: return std::nullopt;
    }
  }

  bool literal(const std::string& want) {
    skip_ws();
    if (s.compare(i, want.size(), want) != 0) return false;
    i += want.size();
    return true;
  }
};

bool remove_value(std::vector<Rational>& values, const Rational& v) {
  const auto it = std::find(values.begin(), values.end(), v);
  if (it == values.end()) return false;
  values.erase(it);
  return true;
}

std::optional<Rational> apply_op(const Rational& a, Op op, const Rational& b) {
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::divide: return divide(a, b);
  }
  return std::nullopt;
}

}  // namespace

ProposalParse parse_proposal(const Game24State& state, const std::string& line) {
  LineScanner sc{line};
  const auto a = sc.rational();
  if (!a) return {std::nullopt, ProposalReject::malformed};
  const auto op = sc.op();
  if (!op) return {std::nullopt, ProposalReject::malformed};
  const auto b = sc.rational();
  if (!b) return {std::nullopt, ProposalReject::malformed};
  if (!sc.literal("=")) return {std::nullopt, ProposalReject::malformed};
  const auto c = sc.rational();
  if (!c) return {std::nullopt, ProposalReject::malformed};
  if (!sc.literal("(left:")) return {std::nullopt, ProposalReject::malformed};
  // The left-list text is intentionally ignored; it gets recomputed below.

  if (*op == Op::divide && b->num == 0) {
    return {std::nullopt, ProposalReject::division_by_zero};
  }

  std::vector<Rational> rest = state.remaining;
  if (!remove_value(rest, *a) || !remove_value(rest, *b)) {
    return {std::nullopt, ProposalReject::operand_missing};
  }

  const auto result = apply_op(*a, *op, *b);
  if (!result) return {std::nullopt, ProposalReject::division_by_zero};
  if (!(*result == *c)) {
    return {std::nullopt, ProposalReject::arithmetic_mismatch};
  }

  Game24State next;
  next.origin = state.origin;
  next.remaining = std::move(rest);
  next.remaining.push_back(*result);
  next.trace = state.trace;

  Operation oper;
  oper.a = *a;
  oper.b = *b;
  oper.op = *op;
  oper.result = *result;
  oper.line = a->str() + " " + op_symbol(*op) + " " + b->str() + " = " +
              result->str() + " (left: " + next.remaining_text() + ")";
  next.trace.push_back(std::move(oper));
  return {std::move(next), ProposalReject::none};
}

// ---- value classification ------------------------------------------------------------

ValueClassification classify_value(const std::string& text) {
  const std::string lower = to_lower(text);
  struct Hit {
    ValueLabel label;
    std::size_t pos;
  };
  std::optional<Hit> best;
  const std::pair<const char*, ValueLabel> keywords[] = {
      {"sure", ValueLabel::sure},
      {"maybe", ValueLabel::maybe},
      {"impossible", ValueLabel::impossible},
  };
  for (const auto& [word, label] : keywords) {
    const std::string w = word;
    std::size_t pos = 0;
    while ((pos = lower.find(w, pos)) != std::string::npos) {
      const bool left_ok =
          pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
      const std::size_t end = pos + w.size();
      const bool right_ok =
          end >= lower.size() ||
          !std::isalnum(static_cast<unsigned char>(lower[end]));
      if (left_ok && right_ok && (!best || pos >= best->pos)) {
        best = Hit{label, pos};
      }
      pos += 1;
    }
  }
  if (!best) return {ValueLabel::maybe, true};
  return {best->label, false};
}

double value_to_score(ValueLabel label, const ValueMapping& mapping) {
  switch (label) {
    case ValueLabel::sure: return mapping.sure;
    case ValueLabel::maybe: return mapping.maybe;
    case ValueLabel::impossible: return mapping.impossible;
  }
  return mapping.maybe;
}

// ---- answers ----------------------------------------------------------------------------

ExprPtr expression_from_trace(const Game24State& state) {
  if (state.trace.size() != 3 || state.remaining.size() != 1) return nullptr;
  std::vector<std::pair<Rational, ExprPtr>> pool;
  for (long long v : state.origin) {
    pool.emplace_back(Rational::integer(v), make_leaf(v));
  }
  for (const Operation& oper : state.trace) {
    const auto take = [&pool](const Rational& v) -> ExprPtr {
      for (auto it = pool.begin(); it != pool.end(); ++it) {
        if (it->first == v) {
          ExprPtr e = it->second;
          pool.erase(it);
          return e;
        }
      }
      return nullptr;
    };
    ExprPtr lhs = take(oper.a);
    ExprPtr rhs = take(oper.b);
    if (!lhs || !rhs) return nullptr;
    pool.emplace_back(oper.result, make_node(oper.op, lhs, rhs));
  }
  if (pool.size() != 1) return nullptr;
  return pool.front().second;
}

ExprPtr answer_from_text(const std::string& text) {
  const std::string lower = to_lower(text);
  std::string segment = text;
  const std::size_t marker = lower.rfind("answer");
  if (marker != std::string::npos) {
    std::size_t start = marker + 6;
    while (start < text.size() &&
           (text[start] == ':' || text[start] == ' ' || text[start] == '\t')) {
      ++start;
    }
    segment = text.substr(start);
  }
  // First line only, cut at '=' so "expr = 24" tails parse cleanly.
  if (const std::size_t nl = segment.find('\n'); nl != std::string::npos) {
    segment = segment.substr(0, nl);
  }
  if (const std::size_t eq = segment.find('='); eq != std::string::npos) {
    segment = segment.substr(0, eq);
  }
  return parse_expression(trim(segment));
}

// ---- prompts ---------------------------------------------------------------------------

namespace {

std::string origin_text(const std::array<long long, 4>& origin) {
  std::string out;
  for (std::size_t i = 0; i < origin.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(origin[i]);
  }
  return out;
}

}  // namespace

std::string propose_prompt(const Game24State& state) {
  if (state.terminal()) {
    return "Input numbers: " + origin_text(state.origin) +
           "\nThe steps so far reduce them to " + state.remaining_text() +
           ".\nWrite one arithmetic expression that uses each input number "
           "exactly once and equals 24.\nAnswer:";
  }
  return "Combine two of the remaining numbers with +, -, * or /.\n"
         "Write one candidate step per line, each formatted exactly as\n"
         "a op b = c (left: numbers that remain)\n"
         "Remaining numbers: " +
         state.remaining_text() + "\nPossible next steps:";
}

std::string value_prompt(const Game24State& state) {
  return "Can the remaining numbers still reach exactly 24 using +, -, * "
         "and /?\nRemaining numbers: " +
         state.remaining_text() +
         "\nReply with exactly one word: sure, maybe or impossible.";
}

std::string io_prompt(const std::array<long long, 4>& origin) {
  return "Use the four numbers " + origin_text(origin) +
         " with +, -, * and /, each number exactly once, to reach 24.\n"
         "Reply with a single line of the form\nAnswer: expression";
}

std::string cot_prompt(const std::array<long long, 4>& origin) {
  return "Use the four numbers " + origin_text(origin) +
         " with +, -, * and /, each number exactly once, to reach 24.\n"
         "Work through intermediate steps one line at a time, then finish "
         "with a line of the form\nAnswer: expression";
}

// ---- dataset / diversity -----------------------------------------------------------------

std::vector<std::array<long long, 4>> parse_instances(const std::string& text) {
  std::vector<std::array<long long, 4>> out;
  int line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream in(line);
    std::array<long long, 4> inst{};
    long long extra = 0;
    if (!(in >> inst[0] >> inst[1] >> inst[2] >> inst[3]) || (in >> extra)) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": expected four integers");
    }
    out.push_back(inst);
  }
  return out;
}

std::vector<std::array<long long, 4>> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instances(buf.str());
}

std::vector<std::array<long long, 4>> generate_instances(int count,
                                                         std::uint64_t seed,
                                                         long long min_value,
                                                         long long max_value,
                                                         bool solvable_only) {
  if (count < 0 || min_value > max_value) {
    throw std::invalid_argument("generate_instances: bad arguments");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> dist(min_value, max_value);
  std::vector<std::array<long long, 4>> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    std::array<long long, 4> inst = {dist(rng), dist(rng), dist(rng), dist(rng)};
    if (solvable_only && oracle_solve(inst).empty()) {
      if (++guard > count * 1000 + 1000) {
        throw std::runtime_error("generate_instances: no solvable instances");
      }
      continue;
    }
    out.push_back(inst);
  }
  return out;
}

std::vector<DiversityRow> solution_diversity(
    const std::vector<std::string>& expressions) {
  std::map<std::string, DiversityRow> buckets;
  int total = 0;
  for (const std::string& text : expressions) {
    ExprPtr e = parse_expression(text);
    if (!e) continue;
    ++total;
    const std::string key = canonicalize(*e).key;
    auto& row = buckets[key];
    if (row.count == 0) {
      row.key = key;
      row.representative = text;
    }
    row.count += 1;
  }
  std::vector<DiversityRow> rows;
  rows.reserve(buckets.size());
  for (auto& [key, row] : buckets) {
    row.frequency = total > 0 ? static_cast<double>(row.count) / total : 0.0;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  return rows;
}

}  // namespace t2ot::game24
