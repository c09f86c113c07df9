#include <doctest.h>

#include "cpi/entailment.hpp"
#include "cpi/error.hpp"
#include "cpi/oracle.hpp"
#include "cpi/simplex.hpp"
#include "support.hpp"

using namespace cpi;
using namespace cpi::testing;

namespace {

QueryResult ask(const char* text, const char* target, const char* given = "true") {
  const auto kb = parse_kb(text);
  const auto ws = make_world_space(kb);
  return entail_conditional(kb, ws, s(target), s(given));
}

}  // namespace

TEST_CASE("simplex: small programs") {
  // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
  LpProblem p;
  p.variables = 2;
  p.sense = Sense::Maximize;
  p.objective = {{0, 1}, {1, 1}};
  p.add_row({{0, 1}, {1, 2}}, Relation::LessEqual, 4);
  p.add_row({{0, 3}, {1, 1}}, Relation::LessEqual, 6);
  auto r = solve(p);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == q("14/5"));
  CHECK(r.x[0] == q("8/5"));
  CHECK(r.x[1] == q("6/5"));

  LpProblem inf;
  inf.variables = 1;
  inf.add_row({{0, 1}}, Relation::GreaterEqual, 2);
  inf.add_row({{0, 1}}, Relation::LessEqual, 1);
  CHECK(solve(inf).status == LpStatus::Infeasible);

  LpProblem unb;
  unb.variables = 1;
  unb.sense = Sense::Maximize;
  unb.objective = {{0, 1}};
  unb.add_row({{0, 1}}, Relation::GreaterEqual, 1);
  CHECK(solve(unb).status == LpStatus::Unbounded);

  // Redundant equalities and a degenerate vertex.
  LpProblem red;
  red.variables = 3;
  red.objective = {{0, 1}};
  red.add_row({{0, 1}, {1, 1}, {2, 1}}, Relation::Equal, 1);
  red.add_row({{0, 2}, {1, 2}, {2, 2}}, Relation::Equal, 2);
  red.add_row({{0, 1}, {1, -1}}, Relation::Equal, 0);
  r = solve(red);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 0);
}

TEST_CASE("feasible") {
  auto f = [](const char* text) {
    const auto kb = parse_kb(text);
    return feasible(kb, make_world_space(kb));
  };
  CHECK(f("atom A\nP(A) = 0.5"));
  CHECK_FALSE(f("atom A\nP(A) >= 0.6\nP(A) <= 0.4"));
  CHECK(f("atom A"));
  CHECK_FALSE(f("atom A B\nP(A | B) = 1\nP(!A | B) = 1\nP(B) >= 0.1"));
}

TEST_CASE("entail_unconditional: examples") {
  auto r = ask("atom A B", "A");
  CHECK(r.status == QueryStatus::Determined);
  CHECK(*r.interval == iv("0", "1"));
  CHECK(*ask("atom A\nP(A) = 0.3", "!A").interval == iv("0.7", "0.7"));
  CHECK(*ask("atom A B\nP(A) = 0.7\nP(A -> B) = 0.8", "B").interval == iv("0.5", "0.8"));
  CHECK_THROWS_AS(ask("atom A\nP(A) >= 0.6\nP(A) <= 0.4", "A"), InfeasibleError);
}

TEST_CASE("entail_conditional: examples") {
  CHECK(*ask("atom A B", "A", "A").interval == iv("1", "1"));
  auto r = ask("atom A B\nP(B) = 0", "A", "B");
  CHECK(r.status == QueryStatus::VacuousByZeroAntecedent);
  CHECK(r.interval->is_vacuous());
  CHECK_FALSE(r.lower_attained);
  CHECK(*ask("atom A B\nP(A | B) >= 0.7\nP(B) = 0.5", "A & B").interval == iv("0.35", "0.5"));
  CHECK(*ask("atom A B\nP(A) = 0.3\nP(B) = 0.5", "A", "B").interval == iv("0", "0.6"));
  // p(B) = 0 feasible but not forced: ratio bounded over p(B) > 0.
  CHECK(*ask("atom A B\nP(A & B) = 0\nP(B) <= 0.5", "A", "B").interval == iv("0", "0"));
}

TEST_CASE("entail_all keeps query order and handles jobs") {
  const auto kb = parse_kb("atom A B\nP(A) = 0.3\nP(B) = 0.5\nquery P((A | B))\nquery P(A & B)\nquery P(A | B)");
  const auto ws = make_world_space(kb);
  for (std::size_t jobs : {1u, 3u}) {
    auto all = entail_all(kb, ws, jobs);
    REQUIRE(all.size() == 3);
    CHECK(*all[0].second.interval == iv("0.5", "0.8"));
    CHECK(*all[1].second.interval == iv("0", "0.3"));
    CHECK(*all[2].second.interval == iv("0", "0.6"));
  }
  KnowledgeBase empty = kb;
  empty.queries.clear();
  CHECK(entail_all(empty, ws).empty());
}

TEST_CASE("entailment invariants on random theories") {
  Generator gen(2024);
  int used = 0;
  for (int trial = 0; trial < 120; ++trial) {
    KnowledgeBase kb = gen.consistent_theory(3, 4);
    const auto ws = make_world_space(kb);
    if (!feasible(kb, ws)) continue;
    ++used;
    const Sentence t = gen.sentence(kb.atoms, 2);
    const Sentence g = gen.sentence(kb.atoms, 1);
    const auto base = entail_unconditional(kb, ws, t);
    REQUIRE(base.interval);
    CHECK(base.interval->lower() <= base.interval->upper());

    // Duality.
    const auto neg = entail_unconditional(kb, ws, !t);
    CHECK(neg.interval->lower() == 1 - base.interval->upper());
    CHECK(neg.interval->upper() == 1 - base.interval->lower());

    // Conditioning on True is the unconditional query.
    CHECK(*entail_conditional(kb, ws, t, Sentence::truth()).interval == *base.interval);

    // Monotonicity: an extra axiom never widens an interval.
    KnowledgeBase more = kb;
    more.axioms.push_back(gen.axiom(kb.atoms, true));
    if (feasible(more, ws)) {
      CHECK(base.interval->contains(*entail_unconditional(more, ws, t).interval));
      const auto c0 = entail_conditional(kb, ws, t, g);
      const auto c1 = entail_conditional(more, ws, t, g);
      if (c0.status == QueryStatus::Determined && c1.status == QueryStatus::Determined)
        CHECK(c0.interval->contains(*c1.interval));
    }

    // Exact agreement with vertex enumeration.
    const auto v = oracle::vertex_bounds(kb, ws, t, g);
    const auto c = entail_conditional(kb, ws, t, g);
    CHECK(v.status == c.status);
    CHECK(*v.interval == *c.interval);
  }
  CHECK(used >= 60);
}
