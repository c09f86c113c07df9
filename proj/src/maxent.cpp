#include "cpi/maxent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cpi/error.hpp"
#include "cpi/simplex.hpp"

namespace cpi {

std::string to_string(Precision p) {
  switch (p) {
    case Precision::PinnedByK: return "pinned_by_k";
    case Precision::PartiallyDetermined: return "partially_determined";
    case Precision::FullyUnderdetermined: return "fully_underdetermined";
  }
  return "?";
}

namespace {

// The dual of max H(x) s.t. A x >= b (rows in `ineq`) and A x = b (the rest),
// sum x = 1, is min_mu log sum_i exp((A^T mu)_i) - b^T mu with mu_ineq >= 0.
class DualProblem {
 public:
  DualProblem(Eigen::MatrixXd a, Eigen::VectorXd b, std::vector<bool> ineq)
      : a_(std::move(a)), b_(std::move(b)), ineq_(std::move(ineq)) {}

  Eigen::Index rows() const { return a_.rows(); }

  Eigen::VectorXd primal(const Eigen::VectorXd& mu) const {
    Eigen::VectorXd s = a_.transpose() * mu;
    const double m = s.size() ? s.maxCoeff() : 0.0;
    Eigen::VectorXd e = (s.array() - m).exp();
    return e / e.sum();
  }

  double value(const Eigen::VectorXd& mu) const {
    Eigen::VectorXd s = a_.transpose() * mu;
    const double m = s.maxCoeff();
    return m + std::log((s.array() - m).exp().sum()) - b_.dot(mu);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return a_ * x - b_; }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd ax = a_ * x;
    return a_ * x.asDiagonal() * a_.transpose() - ax * ax.transpose();
  }

  Eigen::VectorXd project(Eigen::VectorXd mu) const {
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      if (ineq_[static_cast<std::size_t>(j)] && mu[j] < 0) mu[j] = 0;
    return mu;
  }

  // Infinity norm of the projected gradient; zero exactly at a KKT point.
  double residual(const Eigen::VectorXd& mu, const Eigen::VectorXd& g) const {
    double r = 0;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      const double v = ineq_[static_cast<std::size_t>(j)] ? mu[j] - std::max(0.0, mu[j] - g[j]) : g[j];
      r = std::max(r, std::abs(v));
    }
    return r;
  }

  bool is_ineq(Eigen::Index j) const { return ineq_[static_cast<std::size_t>(j)]; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<bool> ineq_;
};

double entropy_of(const std::vector<double>& x) {
  double h = 0;
  for (double v : x)
    if (v > 0) h -= v * std::log(v);
  return h;
}

}  // namespace

MaxEntSolution solve_maxent(const KnowledgeBase& kb, const WorldSpace& ws, const MaxEntOptions& options) {
  const LinearEntailment linear(kb, ws);
  if (!linear.feasible()) throw InfeasibleError("the axioms admit no probability distribution");
  const std::size_t n = ws.size();

  // Worlds no admissible distribution can give positive probability are removed
  // up front; the entropy gradient is unbounded there.
  MaxEntSolution out;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(linear.unconditional(WorldSet{i}).interval->upper()) == 0) out.zero_worlds.push_back(i);
    else active.push_back(i);
  }
  std::vector<Eigen::Index> column(n, -1);
  for (std::size_t k = 0; k < active.size(); ++k) column[active[k]] = static_cast<Eigen::Index>(k);

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  std::vector<bool> ineq;
  for (const auto& c : linear.constraints()) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(active.size()));
    for (const auto& [i, v] : c.coefficients)
      if (column[i] >= 0) row[column[i]] = to_double(v);
    if (row.lpNorm<Eigen::Infinity>() == 0) continue;
    const double sign = c.relation == Relation::LessEqual ? -1.0 : 1.0;
    rows.push_back(sign * row);
    rhs.push_back(sign * to_double(c.rhs));
    ineq.push_back(c.relation != Relation::Equal);
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) a.row(static_cast<Eigen::Index>(j)) = rows[j];
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const DualProblem dual(std::move(a), std::move(b), ineq);

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dual.rows());
  Eigen::VectorXd x = dual.primal(mu);
  Eigen::VectorXd g = dual.gradient(x);
  double residual = dual.residual(mu, g);
  const double target = options.tolerance / 100;
  std::size_t iter = 0;

  for (; iter < options.iteration_cap && residual > target; ++iter) {
    // Projected Newton: bound-active multipliers stay put, the rest take a Newton step.
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      if (!(dual.is_ineq(j) && mu[j] <= 1e-14 && g[j] > 0)) free.push_back(j);

    Eigen::VectorXd direction = Eigen::VectorXd::Zero(mu.size());
    if (!free.empty()) {
      const Eigen::MatrixXd h = dual.hessian(x);
      const auto m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hf(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index p = 0; p < m; ++p) {
        gf[p] = g[free[p]];
        for (Eigen::Index q = 0; q < m; ++q) hf(p, q) = h(free[p], free[q]);
      }
      hf.diagonal().array() += 1e-12 * (1.0 + hf.diagonal().cwiseAbs().maxCoeff());
      const Eigen::VectorXd step = hf.ldlt().solve(-gf);
      for (Eigen::Index p = 0; p < m; ++p) direction[free[p]] = step[p];
    }

    const double f0 = dual.value(mu);
    auto try_steps = [&](const Eigen::VectorXd& dir, Eigen::VectorXd& next) {
      double alpha = 1.0;
      for (int k = 0; k < 60; ++k, alpha *= 0.5) {
        next = dual.project(mu + alpha * dir);
        const double decrease = g.dot(next - mu);
        if (dual.value(next) <= f0 + 1e-4 * decrease && (next - mu).lpNorm<Eigen::Infinity>() > 0) return true;
      }
      return false;
    };
    Eigen::VectorXd next;
    if (!(direction.allFinite() && try_steps(direction, next)) && !try_steps(-g, next)) break;
    mu = std::move(next);
    x = dual.primal(mu);
    g = dual.gradient(x);
    residual = dual.residual(mu, g);
  }

  out.distribution.assign(n, 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) out.distribution[active[k]] = x[static_cast<Eigen::Index>(k)];
  out.entropy = entropy_of(out.distribution);
  out.kkt_residual = residual;
  out.iterations = iter;
  out.converged = residual < options.tolerance;
  return out;
}

PrecisionReport precision_report(const KnowledgeBase& kb, const WorldSpace& ws, const std::vector<Query>& queries,
                                 const MaxEntOptions& options) {
  PrecisionReport report;
  report.solution = solve_maxent(kb, ws, options);
  const LinearEntailment linear(kb, ws);
  for (const auto& q : queries) {
    PrecisionEntry e;
    e.query = q;
    e.entailed = linear.conditional(q.target, q.given);
    double num = 0;
    double den = 0;
    for (auto i : extension(q.given, ws)) den += report.solution.distribution[i];
    for (auto i : extension(q.target && q.given, ws)) num += report.solution.distribution[i];
    e.maxent_value = den > 0 ? num / den : std::numeric_limits<double>::quiet_NaN();
    const auto& iv = *e.entailed.interval;
    e.classification = iv.is_point()     ? Precision::PinnedByK
                       : iv.is_vacuous() ? Precision::FullyUnderdetermined
                                         : Precision::PartiallyDetermined;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace cpi
