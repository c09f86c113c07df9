#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpi/knowledge_base.hpp"

namespace cpi {

/// Which local rule families run. fuzzy_minmax is unsound and off by default;
/// it cannot share a run with the Fréchet rule for the same connective.
struct RuleSet {
  bool negation = true;
  bool frechet_conjunction = true;
  bool frechet_disjunction = true;
  bool conditional_chain = true;
  bool fuzzy_minmax = false;

  static RuleSet sound() { return {}; }
  static RuleSet fuzzy() { return {true, false, false, true, true}; }
  /// Comma-separated names: negation, frechet (both connectives),
  /// frechet_conjunction, frechet_disjunction, conditional_chain, fuzzy_minmax,
  /// or the shorthands `sound` and `fuzzy`. Throws Error.
  static RuleSet parse(std::string_view list);

  /// Throws Error when fuzzy_minmax is combined with a Fréchet rule.
  void validate() const;
  std::string to_string() const;
};

/// Current interval for every tracked sentence.
class BoundsTable {
 public:
  BoundsTable() = default;
  /// Every sentence starts at [0, 1]; True and False start at [1, 1] and [0, 0].
  explicit BoundsTable(const std::vector<Sentence>& tracked);

  void track(const Sentence& s);
  bool tracks(const Sentence& s) const { return entries_.count(s) != 0; }
  const ProbabilityInterval& at(const Sentence& s) const;

  /// Intersects the stored interval with `bound`. Returns whether it shrank.
  /// Throws InconsistencySignal naming `rule` when the intersection is empty.
  bool narrow(const Sentence& s, const ProbabilityInterval& bound, std::string_view rule);

  const std::map<Sentence, ProbabilityInterval>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const BoundsTable&, const BoundsTable&) = default;

 private:
  std::map<Sentence, ProbabilityInterval> entries_;
};

/// p(s) + p(!s) = 1, applied in both directions when both are tracked.
bool apply_rule_negation(BoundsTable& table, const Sentence& s);

/// Fréchet bounds for a & b and a | b (whichever of the two are tracked).
bool apply_rule_frechet(BoundsTable& table, const Sentence& a, const Sentence& b, bool conjunction = true,
                        bool disjunction = true);

/// p(a & b) = min, p(a | b) = max. Requires point intervals on a and b
/// (NonPointInputError). Unsound in general.
bool apply_rule_fuzzy(BoundsTable& table, const Sentence& a, const Sentence& b, bool conjunction = true,
                      bool disjunction = true);

/// From q <= p(A | B) <= r and p(B) in [lb, ub]: p(A) in [q lb, 1 - (1 - r) lb].
bool apply_rule_conditional_chain(BoundsTable& table, const CpiAxiom& axiom);

struct PropagationResult {
  BoundsTable table;
  std::size_t sweeps = 0;
  bool reached_fixpoint = false;
};

/// Applies the enabled rules until nothing changes or `sweep_cap` sweeps ran.
/// Axiom sentences are tracked automatically. `reverse_order` runs the rule
/// schedule backwards (the fixpoint does not depend on it).
PropagationResult propagate_fixpoint(const KnowledgeBase& kb, const RuleSet& rules, const std::vector<Sentence>& tracked,
                                     std::size_t sweep_cap = 1000, bool reverse_order = false);

/// `tracked` plus every subformula, and the negation of each tracked atom.
std::vector<Sentence> subformula_closure(const std::vector<Sentence>& tracked);

enum class Verdict { SoundAndComplete, SoundIncomplete, Unsound };

std::string to_string(Verdict v);

struct Judgement {
  std::vector<std::pair<Sentence, Verdict>> per_sentence;
  Verdict overall = Verdict::SoundAndComplete;
};

/// Sound: inferred ⊇ entailed. Complete: inferred ⊆ entailed.
/// Throws CoverageMismatchError unless both cover the same sentences.
Judgement judge_soundness_completeness(const BoundsTable& propagated,
                                       const std::map<Sentence, ProbabilityInterval>& entailed);

}  // namespace cpi
