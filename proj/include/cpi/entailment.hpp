#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpi/knowledge_base.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

enum class QueryStatus { Determined, VacuousByZeroAntecedent, Infeasible };

std::string to_string(QueryStatus status);

struct SolveStats {
  std::size_t lp_solves = 0;
  std::size_t pivots = 0;
  std::size_t nodes = 0;   // branch-and-bound nodes
  std::size_t sweeps = 0;  // propagation sweeps

  SolveStats& operator+=(const SolveStats& other);
};

/// One entry of the entailed upper-lower distribution.
struct QueryResult {
  QueryStatus status = QueryStatus::Infeasible;
  std::optional<ProbabilityInterval> interval;  // absent iff Infeasible
  // Whether some admissible distribution reaches each endpoint. The reported
  // interval is the closure either way.
  bool lower_attained = false;
  bool upper_attained = false;
  SolveStats stats;
};

/// Exact LP entailment over the linearized axioms K (assumptions excluded).
class LinearEntailment {
 public:
  LinearEntailment(const KnowledgeBase& kb, const WorldSpace& ws);
  LinearEntailment(const WorldSpace& ws, std::vector<LinearConstraint> constraints);

  bool feasible() const { return feasible_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const WorldSpace& world_space() const { return *ws_; }

  /// [min, max] of the probability of `target`. Throws InfeasibleError.
  QueryResult unconditional(const WorldSet& target) const;
  /// Bounds on p(target | given) through the Charnes-Cooper homogenization.
  QueryResult conditional(const WorldSet& target, const WorldSet& given) const;

  QueryResult unconditional(const Sentence& target) const;
  QueryResult conditional(const Sentence& target, const Sentence& given) const;

 private:
  void require_feasible() const;

  const WorldSpace* ws_;
  std::vector<LinearConstraint> constraints_;
  bool feasible_ = false;
  std::size_t feasibility_pivots_ = 0;
};

bool feasible(const KnowledgeBase& kb, const WorldSpace& ws);

QueryResult entail_unconditional(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target);

QueryResult entail_conditional(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target,
                               const Sentence& given);

/// Answers every registered query, in file order. `jobs` > 1 solves queries concurrently.
std::vector<std::pair<Query, QueryResult>> entail_all(const KnowledgeBase& kb, const WorldSpace& ws,
                                                      std::size_t jobs = 1);

}  // namespace cpi
