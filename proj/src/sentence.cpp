#include "cpi/sentence.hpp"

#include <cctype>
#include <utility>

#include "cpi/error.hpp"

namespace cpi {

struct Sentence::Node {
  Kind kind;
  std::string name;
  std::vector<Sentence> children;
};

namespace {

int precedence(Sentence::Kind kind) {
  switch (kind) {
    case Sentence::Kind::Iff: return 1;
    case Sentence::Kind::Implies: return 2;
    case Sentence::Kind::Or: return 3;
    case Sentence::Kind::And: return 4;
    case Sentence::Kind::Not: return 5;
    default: return 6;
  }
}

}  // namespace

Sentence::Sentence(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Sentence::Sentence() : Sentence(truth()) {}

Sentence Sentence::truth() {
  static const auto node = std::make_shared<const Node>(Node{Kind::True, {}, {}});
  return Sentence(node);
}

Sentence Sentence::falsity() {
  static const auto node = std::make_shared<const Node>(Node{Kind::False, {}, {}});
  return Sentence(node);
}

Sentence Sentence::atom(std::string name) {
  return Sentence(std::make_shared<const Node>(Node{Kind::Atom, std::move(name), {}}));
}

Sentence Sentence::negation(Sentence child) {
  return Sentence(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(child)}}));
}

Sentence Sentence::conjunction(std::vector<Sentence> operands) {
  if (operands.empty()) return truth();
  if (operands.size() == 1) return operands.front();
  return Sentence(std::make_shared<const Node>(Node{Kind::And, {}, std::move(operands)}));
}

Sentence Sentence::disjunction(std::vector<Sentence> operands) {
  if (operands.empty()) return falsity();
  if (operands.size() == 1) return operands.front();
  return Sentence(std::make_shared<const Node>(Node{Kind::Or, {}, std::move(operands)}));
}

Sentence Sentence::implies(Sentence antecedent, Sentence consequent) {
  return Sentence(std::make_shared<const Node>(Node{Kind::Implies, {}, {std::move(antecedent), std::move(consequent)}}));
}

Sentence Sentence::iff(Sentence left, Sentence right) {
  return Sentence(std::make_shared<const Node>(Node{Kind::Iff, {}, {std::move(left), std::move(right)}}));
}

Sentence::Kind Sentence::kind() const { return node_->kind; }
const std::string& Sentence::name() const { return node_->name; }
std::span<const Sentence> Sentence::children() const { return node_->children; }

namespace {

void render(const Sentence& s, std::string& out);

void render_child(const Sentence& child, bool parenthesize, std::string& out) {
  if (parenthesize) out += '(';
  render(child, out);
  if (parenthesize) out += ')';
}

void render(const Sentence& s, std::string& out) {
  using K = Sentence::Kind;
  const int own = precedence(s.kind());
  switch (s.kind()) {
    case K::True: out += "true"; return;
    case K::False: out += "false"; return;
    case K::Atom: out += s.name(); return;
    case K::Not:
      out += '!';
      render_child(s.children()[0], precedence(s.children()[0].kind()) < own, out);
      return;
    case K::And:
    case K::Or: {
      const char* sep = s.kind() == K::And ? " & " : " | ";
      bool first = true;
      for (const auto& child : s.children()) {
        if (!first) out += sep;
        first = false;
        render_child(child, precedence(child.kind()) <= own, out);
      }
      return;
    }
    case K::Implies:
      render_child(s.children()[0], precedence(s.children()[0].kind()) <= own, out);
      out += " -> ";
      render_child(s.children()[1], precedence(s.children()[1].kind()) < own, out);
      return;
    case K::Iff:
      render_child(s.children()[0], precedence(s.children()[0].kind()) < own, out);
      out += " <-> ";
      render_child(s.children()[1], precedence(s.children()[1].kind()) <= own, out);
      return;
  }
}

void collect(const Sentence& s, std::set<std::string>& out) {
  if (s.kind() == Sentence::Kind::Atom) out.insert(s.name());
  for (const auto& child : s.children()) collect(child, out);
}

int compare(const Sentence& a, const Sentence& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  auto ca = a.children();
  auto cb = b.children();
  for (std::size_t i = 0; i < ca.size() && i < cb.size(); ++i)
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  return 0;
}

}  // namespace

std::string Sentence::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

std::set<std::string> Sentence::atoms() const {
  std::set<std::string> out;
  collect(*this, out);
  return out;
}

bool operator==(const Sentence& a, const Sentence& b) { return a.node_ == b.node_ || compare(a, b) == 0; }
bool operator<(const Sentence& a, const Sentence& b) { return compare(a, b) < 0; }

bool is_identifier(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, True, False, Not, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;  // 1-based
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Not: return "'!'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const std::size_t column = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string word(text.substr(i, j - i));
      Tok kind = word == "true" ? Tok::True : word == "false" ? Tok::False : Tok::Ident;
      tokens.push_back({kind, std::move(word), column});
      i = j;
    } else if (text.substr(i, 3) == "<->") {
      tokens.push_back({Tok::Iff, "<->", column});
      i += 3;
    } else if (text.substr(i, 2) == "->") {
      tokens.push_back({Tok::Implies, "->", column});
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '!': kind = Tok::Not; break;
        case '&': kind = Tok::And; break;
        case '|': kind = Tok::Or; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        default: throw ParseError(0, column, std::string("unexpected character '") + c + "'");
      }
      tokens.push_back({kind, std::string(1, c), column});
      ++i;
    }
  }
  tokens.push_back({Tok::End, "", text.size() + 1});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Sentence parse() {
    Sentence s = parse_iff();
    expect(Tok::End, "operator or end of input");
    return s;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool accept(Tok t) {
    if (peek().kind != t) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(0, t.column, "expected " + expected + ", found " + found);
  }
  void expect(Tok t, const std::string& expected) {
    if (!accept(t)) fail(expected);
  }

  Sentence parse_iff() {
    Sentence left = parse_implies();
    while (accept(Tok::Iff)) left = Sentence::iff(left, parse_implies());
    return left;
  }

  Sentence parse_implies() {
    Sentence left = parse_or();
    if (accept(Tok::Implies)) return Sentence::implies(left, parse_implies());
    return left;
  }

  Sentence parse_or() {
    std::vector<Sentence> operands{parse_and()};
    while (accept(Tok::Or)) operands.push_back(parse_and());
    return Sentence::disjunction(std::move(operands));
  }

  Sentence parse_and() {
    std::vector<Sentence> operands{parse_unary()};
    while (accept(Tok::And)) operands.push_back(parse_unary());
    return Sentence::conjunction(std::move(operands));
  }

  Sentence parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not:
        ++pos_;
        return Sentence::negation(parse_unary());
      case Tok::LParen: {
        ++pos_;
        Sentence inner = parse_iff();
        expect(Tok::RParen, describe(Tok::RParen));
        return inner;
      }
      case Tok::True: ++pos_; return Sentence::truth();
      case Tok::False: ++pos_; return Sentence::falsity();
      case Tok::Ident: {
        ++pos_;
        return Sentence::atom(t.text);
      }
      default: fail("'!', '(', 'true', 'false' or identifier");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Sentence parse_sentence(std::string_view text) { return Parser(tokenize(text)).parse(); }

Sentence exactly_one(const std::vector<Sentence>& operands) {
  std::vector<Sentence> clauses{Sentence::disjunction(operands)};
  for (std::size_t i = 0; i < operands.size(); ++i)
    for (std::size_t j = i + 1; j < operands.size(); ++j)
      clauses.push_back(!(operands[i] && operands[j]));
  return Sentence::conjunction(std::move(clauses));
}

bool evaluate(const Sentence& s, const World& world) {
  using K = Sentence::Kind;
  switch (s.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: {
      auto it = world.find(s.name());
      if (it == world.end()) throw UnknownAtomError(s.name());
      return it->second;
    }
    case K::Not: return !evaluate(s.children()[0], world);
    case K::And: {
      bool value = true;
      // Evaluate every operand so unknown atoms are always reported.
      for (const auto& c : s.children()) value = evaluate(c, world) && value;
      return value;
    }
    case K::Or: {
      bool value = false;
      for (const auto& c : s.children()) value = evaluate(c, world) || value;
      return value;
    }
    case K::Implies: {
      const bool a = evaluate(s.children()[0], world);
      const bool b = evaluate(s.children()[1], world);
      return !a || b;
    }
    case K::Iff: return evaluate(s.children()[0], world) == evaluate(s.children()[1], world);
  }
  return false;
}

}  // namespace cpi
