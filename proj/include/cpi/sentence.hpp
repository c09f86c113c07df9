#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpi {

/// Immutable propositional formula. Copies share structure.
class Sentence {
 public:
  enum class Kind { True, False, Atom, Not, And, Or, Implies, Iff };

  /// The constant True; also the default antecedent of an unconditional axiom.
  Sentence();

  static Sentence truth();
  static Sentence falsity();
  static Sentence atom(std::string name);
  static Sentence negation(Sentence child);
  /// Zero operands give True, one gives the operand itself.
  static Sentence conjunction(std::vector<Sentence> operands);
  /// Zero operands give False, one gives the operand itself.
  static Sentence disjunction(std::vector<Sentence> operands);
  static Sentence implies(Sentence antecedent, Sentence consequent);
  static Sentence iff(Sentence left, Sentence right);

  Kind kind() const;
  /// Atom name; empty for every other kind.
  const std::string& name() const;
  std::span<const Sentence> children() const;

  bool is_true() const { return kind() == Kind::True; }

  /// Minimal-parenthesis rendering that parses back to the identical tree.
  std::string to_string() const;

  std::set<std::string> atoms() const;

  friend bool operator==(const Sentence& a, const Sentence& b);
  /// Structural total order, used for keyed containers.
  friend bool operator<(const Sentence& a, const Sentence& b);

 private:
  struct Node;
  explicit Sentence(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

inline Sentence operator!(const Sentence& s) { return Sentence::negation(s); }
inline Sentence operator&&(const Sentence& a, const Sentence& b) { return Sentence::conjunction({a, b}); }
inline Sentence operator||(const Sentence& a, const Sentence& b) { return Sentence::disjunction({a, b}); }

/// Parses the grammar
///   sentence := iff ; iff := impl ("<->" impl)* ; impl := or ("->" impl)? ;
///   or := and ("|" and)* ; and := unary ("&" unary)* ;
///   unary := "!" unary | "(" sentence ")" | "true" | "false" | IDENT
/// Throws ParseError carrying the 1-based column.
Sentence parse_sentence(std::string_view text);

/// True iff `name` is a valid atom identifier (letter, then letters, digits, underscores).
bool is_identifier(std::string_view name);

/// Exactly one of the operands holds.
Sentence exactly_one(const std::vector<Sentence>& operands);

/// Total truth assignment.
using World = std::map<std::string, bool, std::less<>>;

/// Classical evaluation. Throws UnknownAtomError when an atom is missing from `world`.
bool evaluate(const Sentence& sentence, const World& world);

}  // namespace cpi
