#include "cpi/entailment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iterator>
#include <thread>

#include "cpi/error.hpp"
#include "cpi/simplex.hpp"

namespace cpi {

std::string to_string(QueryStatus status) {
  switch (status) {
    case QueryStatus::Determined: return "determined";
    case QueryStatus::VacuousByZeroAntecedent: return "vacuous_by_zero_antecedent";
    case QueryStatus::Infeasible: return "infeasible";
  }
  return "?";
}

SolveStats& SolveStats::operator+=(const SolveStats& other) {
  lp_solves += other.lp_solves;
  pivots += other.pivots;
  nodes += other.nodes;
  sweeps += other.sweeps;
  return *this;
}

namespace {

std::vector<std::pair<std::size_t, Rational>> unit_terms(const WorldSet& set, std::size_t offset = 0) {
  std::vector<std::pair<std::size_t, Rational>> terms;
  terms.reserve(set.size());
  for (auto i : set) terms.emplace_back(i + offset, Rational(1));
  return terms;
}

WorldSet intersect(const WorldSet& a, const WorldSet& b) {
  WorldSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Distributions over the worlds satisfying the constraints.
LpProblem distribution_problem(std::size_t worlds, const std::vector<LinearConstraint>& constraints) {
  LpProblem p;
  p.variables = worlds;
  for (const auto& c : constraints) p.add_row(c);
  WorldSet all(worlds);
  for (std::size_t i = 0; i < worlds; ++i) all[i] = i;
  p.add_row(unit_terms(all), Relation::Equal, 1);
  return p;
}

}  // namespace

LinearEntailment::LinearEntailment(const KnowledgeBase& kb, const WorldSpace& ws)
    : LinearEntailment(ws, linearize(kb.axioms, ws)) {}

LinearEntailment::LinearEntailment(const WorldSpace& ws, std::vector<LinearConstraint> constraints)
    : ws_(&ws), constraints_(std::move(constraints)) {
  const auto solution = solve(distribution_problem(ws.size(), constraints_));
  feasible_ = solution.status == LpStatus::Optimal;
  feasibility_pivots_ = solution.pivots;
}

void LinearEntailment::require_feasible() const {
  if (!feasible_) throw InfeasibleError("the axioms admit no probability distribution");
}

QueryResult LinearEntailment::unconditional(const WorldSet& target) const {
  require_feasible();
  LpProblem p = distribution_problem(ws_->size(), constraints_);
  p.objective = unit_terms(target);
  QueryResult r;
  p.sense = Sense::Minimize;
  const auto lo = solve(p);
  p.sense = Sense::Maximize;
  const auto hi = solve(p);
  r.stats.lp_solves = 2;
  r.stats.pivots = lo.pivots + hi.pivots;
  if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
    throw Error("internal: bounded LP did not reach an optimum");
  r.status = QueryStatus::Determined;
  r.interval = ProbabilityInterval(lo.value, hi.value);
  r.lower_attained = r.upper_attained = true;
  return r;
}

QueryResult LinearEntailment::conditional(const WorldSet& target, const WorldSet& given) const {
  require_feasible();
  if (given.size() == ws_->size()) return unconditional(target);

  QueryResult r;
  const std::size_t n = ws_->size();
  {
    LpProblem p = distribution_problem(n, constraints_);
    p.objective = unit_terms(given);
    p.sense = Sense::Maximize;
    const auto best = solve(p);
    r.stats.lp_solves += 1;
    r.stats.pivots += best.pivots;
    if (best.status != LpStatus::Optimal || sgn(best.value) == 0) {
      r.status = QueryStatus::VacuousByZeroAntecedent;
      r.interval = ProbabilityInterval::vacuous();
      return r;
    }
  }

  // y = x / p(given), t = 1 / p(given): homogeneous rows carry over unchanged.
  LpProblem p;
  p.variables = n + 1;
  const std::size_t t = n;
  for (const auto& c : constraints_) p.add_row(c);
  WorldSet all = ws_->all();
  auto total = unit_terms(all);
  total.emplace_back(t, Rational(-1));
  p.add_row(std::move(total), Relation::Equal, 0);
  p.add_row(unit_terms(given), Relation::Equal, 1);
  p.objective = unit_terms(intersect(target, given));

  p.sense = Sense::Minimize;
  const auto lo = solve(p);
  p.sense = Sense::Maximize;
  const auto hi = solve(p);
  r.stats.lp_solves += 2;
  r.stats.pivots += lo.pivots + hi.pivots;
  if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
    throw Error("internal: transformed conditional LP did not reach an optimum");
  r.status = QueryStatus::Determined;
  r.interval = ProbabilityInterval(lo.value, hi.value);
  // Optimal vertices of the transformed program have t >= 1, i.e. p(given) > 0.
  r.lower_attained = r.upper_attained = true;
  return r;
}

QueryResult LinearEntailment::unconditional(const Sentence& target) const {
  ws_->check_atoms(target);
  return unconditional(extension(target, *ws_));
}

QueryResult LinearEntailment::conditional(const Sentence& target, const Sentence& given) const {
  ws_->check_atoms(target);
  ws_->check_atoms(given);
  return conditional(extension(target, *ws_), extension(given, *ws_));
}

bool feasible(const KnowledgeBase& kb, const WorldSpace& ws) { return LinearEntailment(kb, ws).feasible(); }

QueryResult entail_unconditional(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target) {
  return LinearEntailment(kb, ws).unconditional(target);
}

QueryResult entail_conditional(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target,
                               const Sentence& given) {
  return LinearEntailment(kb, ws).conditional(target, given);
}

std::vector<std::pair<Query, QueryResult>> entail_all(const KnowledgeBase& kb, const WorldSpace& ws,
                                                      std::size_t jobs) {
  const LinearEntailment engine(kb, ws);
  if (!engine.feasible()) throw InfeasibleError("the axioms admit no probability distribution");
  std::vector<std::pair<Query, QueryResult>> out;
  for (const auto& q : kb.queries) out.emplace_back(q, QueryResult{});

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(out.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) {
      try {
        out[i].second = engine.conditional(out[i].first.target, out[i].first.given);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(out.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace cpi
