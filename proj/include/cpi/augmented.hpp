#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "cpi/entailment.hpp"
#include "cpi/error.hpp"
#include "cpi/knowledge_base.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

class InfeasibleAugmentedError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

/// p(sentence): the sum of world probabilities over the sentence's extension.
struct AggregateVariable {
  Sentence sentence;
  ProbabilityInterval bounds;
};

/// p(u) * p(v). A factor equal to True is the constant 1.
struct ProductTerm {
  Sentence u;
  Sentence v;

  bool is_linear() const { return u.is_true() || v.is_true(); }
};

/// left (relation) right, e.g. p(C&D&G) p(G) = p(C&G) p(D&G).
struct BilinearConstraint {
  ProductTerm left;
  Relation relation = Relation::Equal;
  ProductTerm right;

  /// left - right evaluated at a distribution.
  Rational residual(const std::vector<Rational>& x, const WorldSpace& ws) const;
  /// How far `x` is from satisfying the constraint (0 when satisfied).
  Rational violation(const std::vector<Rational>& x, const WorldSpace& ws) const;
};

std::vector<BilinearConstraint> encode_assumption(const AssumptionConstraint& assumption, const WorldSpace& ws);

/// Box bounds on aggregates, keyed by defining sentence.
using AggregateBoxes = std::map<Sentence, ProbabilityInterval>;

/// Envelope inequalities for each product of `c`, over the extended variable
/// space: worlds 0..n-1, then one fresh variable per nonlinear product
/// starting at `first_product_variable`, plus the linear row tying the two
/// sides together. Constant terms sit on the right-hand side.
std::vector<LinearConstraint> relax_mccormick(const BilinearConstraint& c, const WorldSpace& ws,
                                              const AggregateBoxes& boxes, std::size_t first_product_variable);

enum class AugmentedStatus { OuterBound, Converged };

struct AugmentedOptions {
  Rational tolerance{1, 1000000};
  std::size_t node_cap = 10000;
};

struct AugmentedResult {
  QueryResult result;
  AugmentedStatus status = AugmentedStatus::OuterBound;
  /// Largest gap between the reported bound and the best nearly-feasible value, per side.
  Rational gap;
};

/// Entailment under K and the bilinear assumptions D. The interval always
/// contains the true entailed interval; `status` says whether both sides
/// closed to within the tolerance before the node cap.
AugmentedResult entail_augmented(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target,
                                 const Sentence& given, const AugmentedOptions& options = {});

/// False only when branch-and-bound proves that K and D admit no distribution.
bool augmented_feasible(const KnowledgeBase& kb, const WorldSpace& ws, const AugmentedOptions& options = {});

}  // namespace cpi
