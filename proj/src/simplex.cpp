#include "cpi/simplex.hpp"

#include <limits>
#include <optional>
#include <stdexcept>

namespace cpi {

void LpProblem::add_row(const LinearConstraint& c, std::size_t offset) {
  Row row;
  row.relation = c.relation;
  row.rhs = c.rhs;
  for (const auto& [i, v] : c.coefficients) row.terms.emplace_back(i + offset, v);
  rows.push_back(std::move(row));
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class Tableau {
 public:
  explicit Tableau(const LpProblem& p) : n_(p.variables) {
    const std::size_t m = p.rows.size();
    std::size_t extra = 0;
    std::size_t artificial = 0;
    for (const auto& r : p.rows) {
      const bool flip = r.rhs < 0;
      const Relation rel = !flip ? r.relation
                           : r.relation == Relation::LessEqual ? Relation::GreaterEqual
                           : r.relation == Relation::GreaterEqual ? Relation::LessEqual
                                                                   : Relation::Equal;
      if (rel != Relation::Equal) ++extra;
      if (rel != Relation::LessEqual) ++artificial;
    }
    first_artificial_ = n_ + extra;
    cols_ = first_artificial_ + artificial;
    rows_.assign(m, std::vector<Rational>(cols_ + 1));
    basis_.assign(m, kNone);

    std::size_t next_extra = n_;
    std::size_t next_art = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& r = p.rows[i];
      const bool flip = r.rhs < 0;
      const Rational sign = flip ? -1 : 1;
      for (const auto& [j, v] : r.terms) {
        if (j >= n_) throw std::out_of_range("LP row references variable beyond problem size");
        rows_[i][j] += sign * v;
      }
      rows_[i][cols_] = sign * r.rhs;
      Relation rel = r.relation;
      if (flip && rel == Relation::LessEqual) rel = Relation::GreaterEqual;
      else if (flip && rel == Relation::GreaterEqual) rel = Relation::LessEqual;
      if (rel == Relation::LessEqual) {
        rows_[i][next_extra] = 1;
        basis_[i] = next_extra++;
      } else {
        if (rel == Relation::GreaterEqual) rows_[i][next_extra++] = -1;
        rows_[i][next_art] = 1;
        basis_[i] = next_art++;
      }
    }
  }

  // Returns false when unbounded. `banned` columns never enter.
  bool optimize(const std::vector<Rational>& cost, std::size_t banned_from) {
    compute_reduced_costs(cost);
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < banned_from; ++j)
        if (sgn(reduced_[j]) < 0) {
          enter = j;
          break;
        }
      if (enter == kNone) return true;

      std::size_t leave = kNone;
      Rational best;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][enter]) <= 0) continue;
        Rational ratio = rows_[i][cols_] / rows_[i][enter];
        if (leave == kNone || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == kNone) return false;
      pivot(leave, enter);
    }
  }

  Rational objective(const std::vector<Rational>& cost) const {
    Rational v = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < cost.size()) v += cost[basis_[i]] * rows_[i][cols_];
    return v;
  }

  // After phase 1: pivot artificials out of the basis or drop redundant rows.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t col = kNone;
      for (std::size_t j = 0; j < first_artificial_; ++j)
        if (sgn(rows_[i][j]) != 0) {
          col = j;
          break;
        }
      if (col == kNone) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        pivot(i, col);
        ++i;
      }
    }
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(n_);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < n_) x[basis_[i]] = rows_[i][cols_];
    return x;
  }

  std::size_t columns() const { return cols_; }
  std::size_t first_artificial() const { return first_artificial_; }
  std::size_t pivots() const { return pivots_; }

 private:
  void compute_reduced_costs(const std::vector<Rational>& cost) {
    reduced_.assign(cols_, Rational(0));
    for (std::size_t j = 0; j < cols_ && j < cost.size(); ++j) reduced_[j] = cost[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t b = basis_[i];
      if (b >= cost.size() || sgn(cost[b]) == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn(rows_[i][j]) != 0) reduced_[j] -= cost[b] * rows_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    ++pivots_;
    auto& prow = rows_[r];
    const Rational inv = 1 / prow[c];
    for (auto& v : prow)
      if (sgn(v) != 0) v *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || sgn(rows_[i][c]) == 0) continue;
      const Rational f = rows_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (sgn(prow[j]) != 0) rows_[i][j] -= f * prow[j];
    }
    if (!reduced_.empty() && sgn(reduced_[c]) != 0) {
      const Rational f = reduced_[c];
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn(prow[j]) != 0) reduced_[j] -= f * prow[j];
    }
    basis_[r] = c;
  }

  std::size_t n_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<std::vector<Rational>> rows_;  // last entry of each row is the rhs
  std::vector<std::size_t> basis_;
  std::vector<Rational> reduced_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve(const LpProblem& problem) {
  Tableau t(problem);
  LpSolution out;

  if (t.first_artificial() < t.columns()) {
    std::vector<Rational> phase1(t.columns());
    for (std::size_t j = t.first_artificial(); j < t.columns(); ++j) phase1[j] = 1;
    t.optimize(phase1, t.columns());
    if (sgn(t.objective(phase1)) > 0) {
      out.status = LpStatus::Infeasible;
      out.pivots = t.pivots();
      return out;
    }
    t.expel_artificials();
  }

  std::vector<Rational> cost(problem.variables);
  for (const auto& [j, v] : problem.objective) {
    if (j >= problem.variables) throw std::out_of_range("objective references variable beyond problem size");
    cost[j] += problem.sense == Sense::Minimize ? v : Rational(-v);
  }
  const bool bounded = t.optimize(cost, t.first_artificial());
  out.pivots = t.pivots();
  if (!bounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.x = t.primal();
  out.value = t.objective(cost);
  if (problem.sense == Sense::Maximize) out.value = -out.value;
  return out;
}

}  // namespace cpi
