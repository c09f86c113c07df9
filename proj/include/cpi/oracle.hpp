#pragma once

#include <cstddef>

#include "cpi/entailment.hpp"
#include "cpi/knowledge_base.hpp"
#include "cpi/world_space.hpp"

/// Brute-force reference bounds for auditing the solvers. Nothing here calls
/// the simplex code; constraints are rebuilt directly from the axioms.
namespace cpi::oracle {

struct GridSearchConfig {
  Rational step{1, 200};   // must be 1/N
  Rational slack{1, 100};  // tolerance applied to the bilinear assumptions only
  std::size_t max_worlds = 5;
};

struct GridResult {
  QueryResult result;      // interval over grid points with positive condition mass
  std::size_t points = 0;  // grid points satisfying every constraint
};

/// Scans every distribution whose probabilities are multiples of `step`.
/// Axioms are checked exactly, assumptions within `slack`. Throws SizeLimitError.
GridResult grid_bounds(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target, const Sentence& given,
                       const GridSearchConfig& config = {});

/// Exact bounds from enumerating every basic solution of the axiom system
/// (assumptions ignored). Conditional queries enumerate the homogenized
/// system. Throws SizeLimitError when more than `max_bases` candidate bases exist.
QueryResult vertex_bounds(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target,
                          const Sentence& given = Sentence::truth(), std::size_t max_bases = 5'000'000);

}  // namespace cpi::oracle
