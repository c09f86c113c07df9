#include <doctest.h>

#include "cpi/augmented.hpp"
#include "cpi/error.hpp"
#include "cpi/oracle.hpp"
#include "cpi/simplex.hpp"
#include "support.hpp"

using namespace cpi;
using namespace cpi::testing;

namespace {

// Range of the product variable z over the McCormick rows with p(A), p(B) fixed.
ProbabilityInterval envelope_range(const char* a_box_lo, const char* a_box_hi, const char* b_box_lo,
                                   const char* b_box_hi, const char* pa, const char* pb) {
  const auto ws = build_world_space({"A", "B"});
  const BilinearConstraint c{{s("A & B"), Sentence::truth()}, Relation::Equal, {s("A"), s("B")}};
  AggregateBoxes boxes{{s("A"), iv(a_box_lo, a_box_hi)}, {s("B"), iv(b_box_lo, b_box_hi)}};
  auto rows = relax_mccormick(c, ws, boxes, ws.size());
  REQUIRE(rows.size() == 5);  // four envelope planes and the tie row
  rows.pop_back();
  const std::size_t z = ws.size();
  LpProblem p;
  p.variables = ws.size() + 1;
  for (const auto& r : rows) p.add_row(r);
  p.add_row({{0, 1}, {1, 1}, {2, 1}, {3, 1}}, Relation::Equal, 1);
  p.add_row({{2, 1}, {3, 1}}, Relation::Equal, q(pa));
  p.add_row({{1, 1}, {3, 1}}, Relation::Equal, q(pb));
  p.objective = {{z, 1}};
  p.sense = Sense::Minimize;
  const auto lo = solve(p);
  p.sense = Sense::Maximize;
  const auto hi = solve(p);
  REQUIRE(lo.status == LpStatus::Optimal);
  REQUIRE(hi.status == LpStatus::Optimal);
  return {lo.value, hi.value};
}

AugmentedResult ask(const char* text, const char* target, const char* given = "true", AugmentedOptions o = {}) {
  const auto kb = parse_kb(text);
  return entail_augmented(kb, make_world_space(kb), s(target), s(given), o);
}

}  // namespace

TEST_CASE("encode_assumption") {
  const auto ws = build_world_space({"C", "D", "G"});
  auto e = encode_assumption(CondIndependence{s("C"), s("D"), Sentence::truth()}, ws);
  REQUIRE(e.size() == 1);
  CHECK(e[0].left.is_linear());
  CHECK(e[0].left.u == s("C & D"));
  CHECK(e[0].right.u == s("C"));
  CHECK(e[0].right.v == s("D"));
  CHECK(e[0].relation == Relation::Equal);

  e = encode_assumption(CondIndependence{s("C"), s("D"), s("G")}, ws);
  REQUIRE(e.size() == 1);
  CHECK(e[0].left.u == Sentence::conjunction({s("C"), s("D"), s("G")}));
  CHECK(e[0].left.v == s("G"));
  CHECK(e[0].right.u == s("C & G"));
  CHECK(e[0].right.v == s("D & G"));

  e = encode_assumption(NegativeCorrelation{s("C"), s("D")}, ws);
  CHECK(e[0].relation == Relation::LessEqual);
  e = encode_assumption(PositiveCorrelation{s("C"), s("D")}, ws);
  CHECK(e[0].relation == Relation::GreaterEqual);

  // Residuals agree with direct evaluation.
  const std::vector<Rational> x{q("0.1"), q("0.2"), q("0.05"), q("0.15"), q("0.1"), q("0.1"), q("0.2"), q("0.1")};
  e = encode_assumption(CondIndependence{s("C"), s("D"), s("G")}, ws);
  const Rational direct = prob(s("C & D & G"), ws, x) * prob(s("G"), ws, x) -
                          prob(s("C & G"), ws, x) * prob(s("D & G"), ws, x);
  CHECK(e[0].residual(x, ws) == direct);
  CHECK(e[0].violation(x, ws) == abs(direct));
}

TEST_CASE("relax_mccormick envelopes") {
  // Unit box: z in [max(0, u+v-1), min(u, v)].
  CHECK(envelope_range("0", "1", "0", "1", "0.7", "0.6") == iv("0.3", "0.6"));
  // Degenerate box linearizes the product.
  CHECK(envelope_range("0.5", "0.5", "0.1", "0.9", "0.5", "0.3") == iv("0.15", "0.15"));
  // Planes evaluated at (0.5, 0.5) on [0.2, 0.8]^2.
  CHECK(envelope_range("0.2", "0.8", "0.2", "0.8", "0.5", "0.5") == iv("0.16", "0.34"));
}

TEST_CASE("entail_augmented: examples") {
  auto r = ask("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume indep(A, B)", "A & B");
  REQUIRE(r.result.interval);
  CHECK(r.status == AugmentedStatus::Converged);
  CHECK(abs(r.result.interval->lower() - q("0.2")) <= q("1e-6"));
  CHECK(abs(r.result.interval->upper() - q("0.2")) <= q("1e-6"));
  CHECK(r.result.stats.nodes <= 100);

  r = ask("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume negcorr(A, B)", "A & B");
  CHECK(abs(r.result.interval->lower() - 0) <= q("1e-6"));
  CHECK(abs(r.result.interval->upper() - q("0.2")) <= q("1e-6"));

  r = ask("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume poscorr(A, B)", "A & B");
  CHECK(abs(r.result.interval->lower() - q("0.2")) <= q("1e-6"));
  CHECK(abs(r.result.interval->upper() - q("0.4")) <= q("1e-6"));

  // Without assumptions the result is the linear one, exactly.
  const auto kb = parse_kb("atom A B\nP(A) = 0.3\nP(B) = 0.5");
  const auto ws = make_world_space(kb);
  for (const char* t : {"A & B", "A | B", "A <-> B"}) {
    const auto a = entail_augmented(kb, ws, s(t), Sentence::truth());
    CHECK(*a.result.interval == *entail_unconditional(kb, ws, s(t)).interval);
  }
  CHECK(*entail_augmented(kb, ws, s("A"), s("B")).result.interval == *entail_conditional(kb, ws, s("A"), s("B")).interval);

  // Conditional independence: P(A | B & C) = P(A | C) when A and B are independent given C.
  r = ask("atom A B C\nP(A | C) = 0.3\nP(B | C) = 0.6\nP(C) = 0.5\nassume indep(A, B | C)", "A", "B & C");
  REQUIRE(r.result.interval);
  CHECK(abs(r.result.interval->lower() - q("0.3")) <= q("1e-5"));
  CHECK(abs(r.result.interval->upper() - q("0.3")) <= q("1e-5"));
}

TEST_CASE("entail_augmented: infeasible and vacuous cases") {
  CHECK_THROWS_AS(ask("atom A B\nP(A) = 0.5\nP(B) = 0.5\nP(A & B) = 0.4\nassume negcorr(A, B)", "A"),
                  InfeasibleAugmentedError);
  auto r = ask("atom A B\nP(B) = 0\nassume indep(A, B)", "A", "B");
  CHECK(r.result.status == QueryStatus::VacuousByZeroAntecedent);
  CHECK(r.result.interval->is_vacuous());
}

TEST_CASE("entail_augmented: node cap yields an outer bound") {
  AugmentedOptions o;
  o.node_cap = 1;
  auto r = ask("atom A B\nP(A) = 0.5\nP(B) = 0.4\nassume indep(A, B)", "A & B", "true", o);
  CHECK(r.status == AugmentedStatus::OuterBound);
  CHECK(r.result.interval->contains(q("0.2")));
  CHECK(r.gap > 0);
}

TEST_CASE("augmented bounds are sound against the grid oracle") {
  // Small world spaces so that the grid stays exhaustive.
  Generator gen(77);
  const char* assumptions[] = {"assume indep(A, B)", "assume negcorr(A, B)", "assume poscorr(A, B)",
                               "assume indep(A, B | C)", "assume negcorr(A, !B)"};
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const bool three = trial % 3 == 2;
    std::string text = three ? "atom A B C\nbackground !(A & B & C)\nbackground A | B | C\nbackground !(!A & B & C)\n"
                             : "atom A B\n";
    KnowledgeBase base = gen.consistent_theory(2, 2, true);
    for (const auto& a : base.axioms) text += a.to_string() + "\n";
    const std::size_t pick[] = {0, 1, 2, 4};
    text += assumptions[three ? 3 : pick[gen.below(4)]];
    text += "\n";
    KnowledgeBase kb;
    try {
      kb = parse_kb(text);
    } catch (const Error&) {
      continue;
    }
    const auto ws = make_world_space(kb);
    REQUIRE(ws.size() <= 5);
    const Sentence target = gen.sentence({"A", "B"}, 2);
    const Sentence given = gen.coin(0.3) ? gen.sentence({"A", "B"}, 1) : Sentence::truth();
    // Zero slack: every kept grid point satisfies K and D exactly, so the true
    // augmented interval contains the grid interval.
    const auto grid = oracle::grid_bounds(kb, ws, target, given, {Rational(1, 60), 0});
    AugmentedResult aug;
    try {
      aug = entail_augmented(kb, ws, target, given);
    } catch (const InfeasibleAugmentedError&) {
      CHECK(grid.points == 0);
      continue;
    }
    if (grid.result.status != QueryStatus::Determined || aug.result.status != QueryStatus::Determined) continue;
    ++compared;
    INFO(text, " target ", target.to_string(), " given ", given.to_string());
    CHECK(aug.result.interval->contains(*grid.result.interval));
    // Assumptions only ever narrow the linear interval.
    const auto linear = entail_conditional(kb, ws, target, given);
    if (linear.status == QueryStatus::Determined) CHECK(linear.interval->contains(*aug.result.interval));
  }
  CHECK(compared >= 10);
}
