#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cpi/knowledge_base.hpp"
#include "cpi/rational.hpp"

namespace cpi {

enum class Sense { Minimize, Maximize };

/// Linear program over nonnegative variables x_0..x_{n-1}.
struct LpProblem {
  struct Row {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Relation relation = Relation::LessEqual;
    Rational rhs;
  };

  std::size_t variables = 0;
  std::vector<Row> rows;
  std::vector<std::pair<std::size_t, Rational>> objective;
  Sense sense = Sense::Minimize;

  void add_row(std::vector<std::pair<std::size_t, Rational>> terms, Relation relation, Rational rhs) {
    rows.push_back({std::move(terms), relation, std::move(rhs)});
  }
  /// Adds a world-indexed constraint whose variables are offset by `offset`.
  void add_row(const LinearConstraint& c, std::size_t offset = 0);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;               // objective value when Optimal
  std::vector<Rational> x;      // primal point when Optimal
  std::size_t pivots = 0;
};

/// Exact two-phase primal simplex with Bland's rule.
LpSolution solve(const LpProblem& problem);

}  // namespace cpi
