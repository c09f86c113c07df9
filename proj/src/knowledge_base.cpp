#include "cpi/knowledge_base.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cpi/error.hpp"

namespace cpi {

ProbabilityInterval::ProbabilityInterval(Rational lower, Rational upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  lower_.canonicalize();
  upper_.canonicalize();
  if (lower_ < 0 || upper_ > 1 || lower_ > upper_)
    throw InvalidBoundError("invalid probability interval [" + to_fraction_string(lower_) + ", " +
                            to_fraction_string(upper_) + "]");
}

std::optional<ProbabilityInterval> ProbabilityInterval::intersect(const ProbabilityInterval& other) const {
  Rational lo = max(lower_, other.lower_);
  Rational hi = min(upper_, other.upper_);
  if (lo > hi) return std::nullopt;
  return ProbabilityInterval(lo, hi);
}

std::string ProbabilityInterval::to_string() const {
  return "[" + to_fraction_string(lower_) + ", " + to_fraction_string(upper_) + "]";
}

namespace {

std::string probability_text(const Sentence& target, const Sentence& given) {
  std::string inner = target.to_string();
  // A bare disjunction would read as conditioning.
  if (target.kind() == Sentence::Kind::Or) inner = "(" + inner + ")";
  if (!given.is_true()) {
    std::string g = given.to_string();
    if (given.kind() == Sentence::Kind::Or) g = "(" + g + ")";
    inner += " | " + g;
  }
  return "P(" + inner + ")";
}

}  // namespace

std::string CpiAxiom::to_string() const {
  const std::string p = probability_text(consequent, antecedent);
  if (bounds.is_point()) return p + " = " + to_fraction_string(bounds.lower());
  if (bounds.upper() == 1) return to_fraction_string(bounds.lower()) + " <= " + p;
  if (bounds.lower() == 0) return p + " <= " + to_fraction_string(bounds.upper());
  return to_fraction_string(bounds.lower()) + " <= " + p + " <= " + to_fraction_string(bounds.upper());
}

std::string Query::to_string() const { return probability_text(target, given); }

std::string to_string(const AssumptionConstraint& assumption) {
  struct Visitor {
    std::string operator()(const CondIndependence& c) const {
      std::string out = "indep(" + c.first.to_string() + ", " + c.second.to_string();
      if (!c.given.is_true()) out += " | " + c.given.to_string();
      return out + ")";
    }
    std::string operator()(const PositiveCorrelation& c) const {
      return "poscorr(" + c.a.to_string() + ", " + c.b.to_string() + ")";
    }
    std::string operator()(const NegativeCorrelation& c) const {
      return "negcorr(" + c.a.to_string() + ", " + c.b.to_string() + ")";
    }
  };
  return std::visit(Visitor{}, assumption);
}

// ---------------------------------------------------------------------------
// Knowledge-base language

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::size_t line, std::string_view text, const std::set<std::string>& atoms)
      : line_(line), text_(text), atoms_(atoms) {}

  [[noreturn]] void fail(std::string_view at, const std::string& message) const {
    throw ParseError(line_, column(at), message);
  }

  std::size_t column(std::string_view at) const {
    if (at.data() >= text_.data() && at.data() <= text_.data() + text_.size())
      return static_cast<std::size_t>(at.data() - text_.data()) + 1;
    return 1;
  }

  Sentence sentence(std::string_view s) const {
    s = trim(s);
    if (s.empty()) fail(s, "expected a sentence");
    Sentence parsed;
    try {
      parsed = parse_sentence(s);
    } catch (const ParseError& e) {
      throw ParseError(line_, column(s) + e.column() - 1, std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
    for (const auto& a : parsed.atoms())
      if (!atoms_.count(a)) throw UnknownAtomError(a, line_);
    return parsed;
  }

  Rational number(std::string_view s) const {
    s = trim(s);
    try {
      return parse_rational(s);
    } catch (const std::invalid_argument&) {
      fail(s, "expected a number, found '" + std::string(s) + "'");
    }
  }

  // Splits "X | Y" at the single top-level bar. Returns {X, nullopt} when there is none.
  std::pair<std::string_view, std::optional<std::string_view>> split_condition(std::string_view s) const {
    int depth = 0;
    std::optional<std::size_t> bar;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      else if (s[i] == ')') --depth;
      else if (s[i] == '|' && depth == 0) {
        if (bar) fail(s.substr(i), "more than one top-level '|'; parenthesize disjunctions");
        bar = i;
      }
    }
    if (!bar) return {s, std::nullopt};
    return {s.substr(0, *bar), s.substr(*bar + 1)};
  }

  // "P(" ... ")" -> (target, given). `s` must start at 'P'.
  std::pair<Sentence, Sentence> probability(std::string_view s, std::size_t* consumed) const {
    if (s.size() < 2 || s[0] != 'P' || s[1] != '(') fail(s, "expected 'P('");
    int depth = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string_view::npos) fail(s, "unbalanced parentheses in P(...)");
    auto [target, given] = split_condition(s.substr(2, close - 2));
    if (consumed) *consumed = close + 1;
    return {sentence(target), given ? sentence(*given) : Sentence::truth()};
  }

 private:
  std::size_t line_;
  std::string_view text_;
  const std::set<std::string>& atoms_;
};

enum class Op { Le, Ge, Eq };

// Reads a comparison operator at the start (or end) of `s`.
std::optional<std::pair<Op, std::size_t>> leading_op(std::string_view s) {
  if (s.starts_with("<=")) return std::pair{Op::Le, std::size_t{2}};
  if (s.starts_with(">=")) return std::pair{Op::Ge, std::size_t{2}};
  if (s.starts_with("=")) return std::pair{Op::Eq, std::size_t{1}};
  return std::nullopt;
}

std::optional<std::pair<Op, std::size_t>> trailing_op(std::string_view s) {
  if (s.ends_with("<=")) return std::pair{Op::Le, std::size_t{2}};
  if (s.ends_with(">=")) return std::pair{Op::Ge, std::size_t{2}};
  if (s.ends_with("=")) return std::pair{Op::Eq, std::size_t{1}};
  return std::nullopt;
}

CpiAxiom parse_axiom(const LineParser& lp, std::string_view body, std::size_t line) {
  const auto p_pos = body.find("P(");
  if (p_pos == std::string_view::npos) lp.fail(body, "unrecognized statement");
  std::size_t consumed = 0;
  auto [target, given] = lp.probability(body.substr(p_pos), &consumed);
  std::string_view left = trim(body.substr(0, p_pos));
  std::string_view right = trim(body.substr(p_pos + consumed));

  std::optional<Rational> lower, upper;
  auto set_side = [&](std::optional<Rational>& side, const Rational& v, std::string_view at) {
    if (side) lp.fail(at, "bound given twice");
    side = v;
  };
  // `value op P(...)`
  auto apply_left = [&](Op op, const Rational& v, std::string_view at) {
    if (op == Op::Le) set_side(lower, v, at);
    else if (op == Op::Ge) set_side(upper, v, at);
    else {
      set_side(lower, v, at);
      set_side(upper, v, at);
    }
  };
  // `P(...) op value`
  auto apply_right = [&](Op op, const Rational& v, std::string_view at) {
    if (op == Op::Le) set_side(upper, v, at);
    else if (op == Op::Ge) set_side(lower, v, at);
    else {
      set_side(lower, v, at);
      set_side(upper, v, at);
    }
  };

  if (!left.empty()) {
    auto op = trailing_op(left);
    if (!op) lp.fail(left, "expected '<=', '>=' or '=' before P(...)");
    apply_left(op->first, lp.number(left.substr(0, left.size() - op->second)), left);
  }
  if (!right.empty()) {
    auto op = leading_op(right);
    if (!op) lp.fail(right, "expected '<=', '>=' or '=' after P(...)");
    apply_right(op->first, lp.number(right.substr(op->second)), right);
  }
  if (!lower && !upper) lp.fail(body, "probability statement has no bound");

  const Rational lo = lower.value_or(Rational(0));
  const Rational hi = upper.value_or(Rational(1));
  if (lo < 0 || lo > 1 || hi < 0 || hi > 1)
    throw InvalidBoundError("line " + std::to_string(line) + ": bound outside [0, 1]");
  if (lo > hi) throw InvalidBoundError("line " + std::to_string(line) + ": lower bound exceeds upper bound");
  return CpiAxiom{target, given, ProbabilityInterval(lo, hi), line};
}

// Splits `inner` of name(...) on commas.
std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

AssumptionConstraint parse_assumption(const LineParser& lp, std::string_view body) {
  body = trim(body);
  const auto open = body.find('(');
  if (open == std::string_view::npos || body.back() != ')') lp.fail(body, "expected indep(...), poscorr(...) or negcorr(...)");
  const std::string_view name = trim(body.substr(0, open));
  const auto args = split_commas(body.substr(open + 1, body.size() - open - 2));
  if (args.size() != 2) lp.fail(body, "expected two comma-separated arguments");
  if (name == "indep") {
    auto [second, given] = lp.split_condition(args[1]);
    return CondIndependence{lp.sentence(args[0]), lp.sentence(second),
                            given ? lp.sentence(*given) : Sentence::truth()};
  }
  if (name == "poscorr") return PositiveCorrelation{lp.sentence(args[0]), lp.sentence(args[1])};
  if (name == "negcorr") return NegativeCorrelation{lp.sentence(args[0]), lp.sentence(args[1])};
  lp.fail(name, "unknown assumption '" + std::string(name) + "'");
}

std::vector<FrameElement> parse_frame(const LineParser& lp, std::string_view body,
                                      const std::set<std::string>& atoms) {
  std::vector<FrameElement> frame;
  std::set<std::string> names;
  for (auto part : split_commas(body)) {
    part = trim(part);
    std::string_view name = part;
    std::optional<Sentence> sentence;
    if (auto eq = part.find('='); eq != std::string_view::npos) {
      name = trim(part.substr(0, eq));
      sentence = lp.sentence(part.substr(eq + 1));
    } else if (atoms.count(std::string(part))) {
      sentence = Sentence::atom(std::string(part));
    }
    if (!is_identifier(name)) lp.fail(part, "invalid frame element name '" + std::string(name) + "'");
    if (!names.insert(std::string(name)).second) lp.fail(part, "duplicate frame element '" + std::string(name) + "'");
    frame.push_back({std::string(name), std::move(sentence)});
  }
  if (frame.empty()) lp.fail(body, "empty frame");
  return frame;
}

void parse_mass(const LineParser& lp, std::string_view body, const std::vector<FrameElement>& frame,
                std::vector<MassDeclaration>& masses) {
  body = trim(body);
  if (frame.empty()) lp.fail(body, "mass declared before any frame");
  std::size_t name_end = 0;
  while (name_end < body.size() && !std::isspace(static_cast<unsigned char>(body[name_end]))) ++name_end;
  const std::string source(body.substr(0, name_end));
  if (!is_identifier(source)) lp.fail(body, "expected a source name");

  auto it = std::find_if(masses.begin(), masses.end(), [&](const auto& m) { return m.source == source; });
  if (it == masses.end()) {
    masses.push_back({source, {}});
    it = masses.end() - 1;
  }

  std::string_view rest = trim(body.substr(name_end));
  while (!rest.empty()) {
    std::vector<std::string> subset;
    if (rest.starts_with("theta")) {
      for (const auto& e : frame) subset.push_back(e.name);
      rest.remove_prefix(5);
    } else if (rest.front() == '{') {
      const auto close = rest.find('}');
      if (close == std::string_view::npos) lp.fail(rest, "unterminated '{'");
      for (auto e : split_commas(rest.substr(1, close - 1))) {
        e = trim(e);
        if (e.empty()) continue;
        if (std::none_of(frame.begin(), frame.end(), [&](const auto& f) { return f.name == e; }))
          lp.fail(e, "'" + std::string(e) + "' is not a frame element");
        subset.emplace_back(e);
      }
      if (subset.empty()) lp.fail(rest, "the empty set cannot carry mass");
      rest.remove_prefix(close + 1);
    } else {
      lp.fail(rest, "expected '{' or 'theta'");
    }
    rest = trim(rest);
    if (rest.empty() || rest.front() != ':') lp.fail(rest, "expected ':'");
    rest.remove_prefix(1);
    const auto comma = rest.find(',');
    const Rational value = lp.number(rest.substr(0, comma));
    if (value < 0 || value > 1) throw InvalidBoundError("mass outside [0, 1] in source '" + source + "'");
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    for (const auto& [existing, _] : it->focal)
      if (existing == subset) lp.fail(rest, "focal set listed twice");
    it->focal.emplace_back(std::move(subset), value);
    rest = comma == std::string_view::npos ? std::string_view{} : trim(rest.substr(comma + 1));
  }
}

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '\n') {
        std::string_view l = text.substr(start, i - start);
        if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        lines.push_back(l);
        start = i + 1;
      }
    }
  }

  KnowledgeBase kb;
  std::set<std::string> atoms;
  // Atoms first, so declarations may appear anywhere in the file.
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto words = split_words(lines[n]);
    if (words.empty() || words.front() != "atom") continue;
    if (words.size() < 2) throw ParseError(n + 1, 1, "'atom' needs at least one name");
    for (std::size_t i = 1; i < words.size(); ++i) {
      std::string name(words[i]);
      const auto col = static_cast<std::size_t>(words[i].data() - lines[n].data()) + 1;
      if (!is_identifier(name) || name == "true" || name == "false")
        throw ParseError(n + 1, col, "invalid atom name '" + name + "'");
      if (!atoms.insert(name).second) throw ParseError(n + 1, col, "atom '" + name + "' declared twice");
      kb.atoms.push_back(std::move(name));
    }
  }

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line = n + 1;
    const std::string_view raw = lines[n];
    const std::string_view body = trim(raw);
    if (body.empty()) continue;
    LineParser lp(line, raw, atoms);
    auto words = split_words(body);
    const std::string_view keyword = words.front();
    const std::string_view rest = trim(body.substr(keyword.size()));
    if (keyword == "atom") continue;
    if (keyword == "background") {
      kb.background.push_back(lp.sentence(rest));
    } else if (keyword == "assume") {
      kb.assumptions.push_back(parse_assumption(lp, rest));
    } else if (keyword == "query") {
      std::size_t consumed = 0;
      auto [target, given] = lp.probability(rest, &consumed);
      if (!trim(rest.substr(consumed)).empty()) lp.fail(rest.substr(consumed), "unexpected text after query");
      kb.queries.push_back({target, given});
    } else if (keyword == "frame") {
      if (!kb.frame.empty()) lp.fail(body, "frame declared twice");
      kb.frame = parse_frame(lp, rest, atoms);
    } else if (keyword == "mass") {
      parse_mass(lp, rest, kb.frame, kb.masses);
    } else {
      kb.axioms.push_back(parse_axiom(lp, body, line));
    }
  }
  return kb;
}

WorldSpace make_world_space(const KnowledgeBase& kb, std::size_t atom_cap) {
  return build_world_space(kb.atoms, kb.background, atom_cap);
}

Rational LinearConstraint::lhs(const std::vector<Rational>& x) const {
  Rational sum = 0;
  for (const auto& [i, c] : coefficients) sum += c * x.at(i);
  return sum;
}

bool LinearConstraint::satisfied_by(const std::vector<Rational>& x) const {
  const Rational v = lhs(x);
  switch (relation) {
    case Relation::LessEqual: return v <= rhs;
    case Relation::Equal: return v == rhs;
    case Relation::GreaterEqual: return v >= rhs;
  }
  return false;
}

std::vector<LinearConstraint> linearize(const CpiAxiom& axiom, const WorldSpace& ws) {
  ws.check_atoms(axiom.consequent);
  ws.check_atoms(axiom.antecedent);
  const WorldSet joint = extension(axiom.consequent && axiom.antecedent, ws);
  const WorldSet condition = extension(axiom.antecedent, ws);

  auto build = [&](const Rational& bound, Relation relation) {
    LinearConstraint c;
    c.relation = relation;
    c.rhs = 0;
    for (auto i : condition) c.coefficients[i] -= bound;
    for (auto i : joint) c.coefficients[i] += 1;
    std::erase_if(c.coefficients, [](const auto& kv) { return kv.second == 0; });
    return c;
  };

  std::vector<LinearConstraint> out;
  if (axiom.bounds.lower() > 0) out.push_back(build(axiom.bounds.lower(), Relation::GreaterEqual));
  if (axiom.bounds.upper() < 1) out.push_back(build(axiom.bounds.upper(), Relation::LessEqual));
  return out;
}

std::vector<LinearConstraint> linearize(const std::vector<CpiAxiom>& axioms, const WorldSpace& ws) {
  std::vector<LinearConstraint> out;
  for (const auto& a : axioms) {
    auto rows = linearize(a, ws);
    out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return out;
}

}  // namespace cpi
