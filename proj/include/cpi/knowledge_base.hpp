#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpi/rational.hpp"
#include "cpi/sentence.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

/// Closed interval [lower, upper] with 0 <= lower <= upper <= 1.
class ProbabilityInterval {
 public:
  /// The vacuous interval [0, 1].
  ProbabilityInterval() : lower_(0), upper_(1) {}
  /// Throws InvalidBoundError unless 0 <= lower <= upper <= 1.
  ProbabilityInterval(Rational lower, Rational upper);

  static ProbabilityInterval vacuous() { return {}; }
  static ProbabilityInterval point(const Rational& value) { return {value, value}; }

  const Rational& lower() const { return lower_; }
  const Rational& upper() const { return upper_; }

  bool is_point() const { return lower_ == upper_; }
  bool is_vacuous() const { return lower_ == 0 && upper_ == 1; }
  bool contains(const Rational& value) const { return lower_ <= value && value <= upper_; }
  bool contains(const ProbabilityInterval& other) const {
    return lower_ <= other.lower_ && other.upper_ <= upper_;
  }
  /// Empty intersections give nullopt.
  std::optional<ProbabilityInterval> intersect(const ProbabilityInterval& other) const;

  std::string to_string() const;

  friend bool operator==(const ProbabilityInterval&, const ProbabilityInterval&) = default;

 private:
  Rational lower_;
  Rational upper_;
};

/// q <= p(consequent | antecedent) <= r. Unconditional axioms have antecedent True.
struct CpiAxiom {
  Sentence consequent;
  Sentence antecedent;
  ProbabilityInterval bounds;
  std::size_t line = 0;  // source line in the knowledge-base file, 0 if built in code

  std::string to_string() const;
};

/// p(first & second | given) = p(first | given) * p(second | given); given may be True.
struct CondIndependence {
  Sentence first;
  Sentence second;
  Sentence given;
};

/// p(a & b) >= p(a) * p(b)
struct PositiveCorrelation {
  Sentence a;
  Sentence b;
};

/// p(a & b) <= p(a) * p(b)
struct NegativeCorrelation {
  Sentence a;
  Sentence b;
};

using AssumptionConstraint = std::variant<CondIndependence, PositiveCorrelation, NegativeCorrelation>;

std::string to_string(const AssumptionConstraint& assumption);

/// A conditional probability of interest, p(target | given).
struct Query {
  Sentence target;
  Sentence given;

  std::string to_string() const;
};

struct FrameElement {
  std::string name;
  std::optional<Sentence> sentence;  // set when the element is mapped onto the world space
};

/// One `mass` source: focal subsets listed by element name.
struct MassDeclaration {
  std::string source;
  std::vector<std::pair<std::vector<std::string>, Rational>> focal;
};

struct KnowledgeBase {
  std::vector<std::string> atoms;
  std::vector<Sentence> background;
  std::vector<CpiAxiom> axioms;
  std::vector<AssumptionConstraint> assumptions;
  std::vector<Query> queries;
  std::vector<FrameElement> frame;
  std::vector<MassDeclaration> masses;
};

/// Parses the knowledge-base language, one statement per line, `#` comments:
///
///   atom A B C
///   background !(A & B)
///   0.3 <= P(A)          P(A) <= 0.8        0.2 <= P(A | B) <= 0.9        P(A | B) = 7/10
///   assume indep(A, B | C)    assume poscorr(A, B)    assume negcorr(A, B)
///   query P(A)                query P(A | B)
///   frame a = A, b = B, c = C
///   mass s1 {a}: 0.6, {a,b}: 0.4, theta: 0
///
/// A top-level `|` inside P(...) or indep(...) is the conditioning bar, so an
/// unconditional disjunction is written with parentheses: P((A | B)).
/// Throws ParseError (with line), UnknownAtomError, InvalidBoundError.
KnowledgeBase parse_kb(std::string_view text);

/// World space over the knowledge base's atoms and background theory.
WorldSpace make_world_space(const KnowledgeBase& kb, std::size_t atom_cap = kDefaultAtomCap);

enum class Relation { LessEqual, Equal, GreaterEqual };

/// sum_i coefficients[i] * x_i  (relation)  rhs, over world probabilities x_i.
struct LinearConstraint {
  std::map<std::size_t, Rational> coefficients;
  Relation relation = Relation::LessEqual;
  Rational rhs;

  /// Exact evaluation of the left-hand side.
  Rational lhs(const std::vector<Rational>& x) const;
  bool satisfied_by(const std::vector<Rational>& x) const;
};

/// Homogeneous inequalities p(A & B) - q p(B) >= 0 and p(A & B) - r p(B) <= 0.
/// The q = 0 and r = 1 sides are vacuous and omitted.
std::vector<LinearConstraint> linearize(const CpiAxiom& axiom, const WorldSpace& ws);

std::vector<LinearConstraint> linearize(const std::vector<CpiAxiom>& axioms, const WorldSpace& ws);

}  // namespace cpi
