#include "cpi/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

#include "cpi/error.hpp"

namespace cpi::oracle {

namespace {

using Mask = std::vector<char>;

Mask membership(const Sentence& s, const WorldSpace& ws) {
  Mask m(ws.size(), 0);
  for (std::size_t i = 0; i < ws.size(); ++i) m[i] = evaluate(s, ws.world(i)) ? 1 : 0;
  return m;
}

std::int64_t mass(const Mask& m, const std::vector<std::int64_t>& k) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (m[i]) s += k[i];
  return s;
}

struct GridAssumption {
  enum Kind { Equal, LessEqual, GreaterEqual } kind;
  // left = a * b, right = c * d (masks); constant 1 is the all-ones mask.
  Mask a, b, c, d;
};

std::int64_t to_i64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw SizeLimitError("grid oracle: coefficient too large");
  return z.get_si();
}

}  // namespace

GridResult grid_bounds(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target, const Sentence& given,
                       const GridSearchConfig& config) {
  const std::size_t n = ws.size();
  if (n > config.max_worlds)
    throw SizeLimitError("grid oracle supports at most " + std::to_string(config.max_worlds) + " worlds");
  if (config.step <= 0 || config.step.get_num() != 1) throw Error("grid step must be 1/N");
  const std::int64_t resolution = to_i64(config.step.get_den());

  // Each axiom q <= p(A|B) <= r gives two integer forms that must be >= 0:
  //   q_den p(A&B) - q_num p(B)  and  r_num p(B) - r_den p(A&B).
  std::vector<std::vector<std::int64_t>> forms;
  for (const auto& a : kb.axioms) {
    const Mask joint = membership(a.consequent && a.antecedent, ws);
    const Mask cond = membership(a.antecedent, ws);
    const std::int64_t qn = to_i64(a.bounds.lower().get_num()), qd = to_i64(a.bounds.lower().get_den());
    const std::int64_t rn = to_i64(a.bounds.upper().get_num()), rd = to_i64(a.bounds.upper().get_den());
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = qd * joint[i] - qn * cond[i];
      hi[i] = rn * cond[i] - rd * joint[i];
    }
    forms.push_back(std::move(lo));
    forms.push_back(std::move(hi));
  }
  // best[f][i] = largest coefficient of form f among worlds i..n-1.
  std::vector<std::vector<std::int64_t>> best(forms.size(), std::vector<std::int64_t>(n + 1, 0));
  for (std::size_t f = 0; f < forms.size(); ++f) {
    best[f][n] = std::numeric_limits<std::int64_t>::min() / 4;
    for (std::size_t i = n; i-- > 0;) best[f][i] = std::max(best[f][i + 1], forms[f][i]);
  }

  const Mask one(n, 1);
  std::vector<GridAssumption> assumptions;
  for (const auto& d : kb.assumptions) {
    if (auto* c = std::get_if<CondIndependence>(&d)) {
      assumptions.push_back({GridAssumption::Equal, membership(Sentence::conjunction({c->first, c->second, c->given}), ws),
                             membership(c->given, ws), membership(c->first && c->given, ws),
                             membership(c->second && c->given, ws)});
    } else if (auto* p = std::get_if<PositiveCorrelation>(&d)) {
      assumptions.push_back({GridAssumption::GreaterEqual, membership(p->a && p->b, ws), one, membership(p->a, ws),
                             membership(p->b, ws)});
    } else if (auto* m = std::get_if<NegativeCorrelation>(&d)) {
      assumptions.push_back({GridAssumption::LessEqual, membership(m->a && m->b, ws), one, membership(m->a, ws),
                             membership(m->b, ws)});
    }
  }
  const std::int64_t slack_num = to_i64(config.slack.get_num());
  const std::int64_t slack_den = to_i64(config.slack.get_den());
  // A product difference d (in grid units squared) is within slack iff |d| slack_den <= slack_num N^2.
  const std::int64_t allowed = slack_num * resolution * resolution;

  const Mask num_mask = membership(target && given, ws);
  const Mask den_mask = membership(given, ws);

  GridResult out;
  std::optional<std::pair<std::int64_t, std::int64_t>> lo, hi;  // ratios num/den
  std::vector<std::int64_t> k(n, 0);
  std::vector<std::vector<std::int64_t>> acc(n + 1, std::vector<std::int64_t>(forms.size(), 0));

  auto leaf = [&] {
    for (const auto& a : assumptions) {
      const std::int64_t scaled = (mass(a.a, k) * mass(a.b, k) - mass(a.c, k) * mass(a.d, k)) * slack_den;
      if (a.kind == GridAssumption::Equal && (scaled > allowed || scaled < -allowed)) return;
      if (a.kind == GridAssumption::LessEqual && scaled > allowed) return;
      if (a.kind == GridAssumption::GreaterEqual && scaled < -allowed) return;
    }
    ++out.points;
    const std::int64_t den = mass(den_mask, k);
    if (den == 0) return;
    const std::int64_t num = mass(num_mask, k);
    if (!lo || num * lo->second < lo->first * den) lo = {num, den};
    if (!hi || num * hi->second > hi->first * den) hi = {num, den};
  };

  auto floor_div = [](std::int64_t a, std::int64_t b) {  // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
  };

  // Without assumptions the last free coordinate needs no loop: every form is
  // affine in it, so the feasible values form one integer interval, and the
  // query ratio is monotone along it (linear-fractional), so its grid extremes
  // lie at the two ends or their inner neighbours.
  auto last_free = [&](std::size_t i, std::int64_t remaining) {
    std::int64_t vlo = 0, vhi = remaining;
    for (std::size_t f = 0; f < forms.size() && vlo <= vhi; ++f) {
      const std::int64_t base = acc[i][f] + forms[f][n - 1] * remaining;
      const std::int64_t slope = forms[f][i] - forms[f][n - 1];
      if (slope > 0) {
        vlo = std::max(vlo, -floor_div(base, slope));  // ceil(-base / slope)
      } else if (slope < 0) {
        vhi = std::min(vhi, floor_div(base, -slope));
      } else if (base < 0) {
        vhi = -1;
      }
    }
    if (vlo > vhi) return;
    out.points += static_cast<std::size_t>(vhi - vlo + 1);
    for (std::int64_t v : {vlo, vlo + 1, vhi - 1, vhi}) {
      if (v < vlo || v > vhi) continue;
      k[i] = v;
      k[n - 1] = remaining - v;
      const std::int64_t den = mass(den_mask, k);
      if (den == 0) continue;
      const std::int64_t num = mass(num_mask, k);
      if (!lo || num * lo->second < lo->first * den) lo = {num, den};
      if (!hi || num * hi->second > hi->first * den) hi = {num, den};
    }
  };

  // Assign world i with `remaining` grid units left; acc[i] holds the forms over worlds < i.
  std::function<void(std::size_t, std::int64_t)> recurse = [&](std::size_t i, std::int64_t remaining) {
    for (std::size_t f = 0; f < forms.size(); ++f)
      if (acc[i][f] + remaining * best[f][i] < 0) return;  // no completion satisfies form f
    if (assumptions.empty() && i + 2 == n) {
      last_free(i, remaining);
      return;
    }
    const std::int64_t first = i + 1 == n ? remaining : 0;
    for (std::int64_t v = first; v <= remaining; ++v) {
      k[i] = v;
      for (std::size_t f = 0; f < forms.size(); ++f) acc[i + 1][f] = acc[i][f] + forms[f][i] * v;
      if (i + 1 == n) {
        if (std::all_of(acc[n].begin(), acc[n].end(), [](std::int64_t x) { return x >= 0; })) leaf();
      } else {
        recurse(i + 1, remaining - v);
      }
    }
  };
  recurse(0, resolution);

  if (out.points == 0) {
    out.result.status = QueryStatus::Infeasible;
  } else if (!lo) {
    out.result.status = QueryStatus::VacuousByZeroAntecedent;
    out.result.interval = ProbabilityInterval::vacuous();
  } else {
    out.result.status = QueryStatus::Determined;
    Rational l(lo->first, lo->second), h(hi->first, hi->second);
    l.canonicalize();
    h.canonicalize();
    out.result.interval = ProbabilityInterval(l, h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vertex enumeration

namespace {

struct Row {
  std::vector<Rational> coef;
  Rational rhs;
};

struct System {
  std::size_t vars = 0;
  std::vector<Row> equalities;
  std::vector<Row> inequalities;  // coef . v >= rhs
};

// Unique solution of the square-or-tall system, or nullopt when singular/inconsistent.
std::optional<std::vector<Rational>> solve_exact(std::vector<Row> rows, std::size_t vars) {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < vars && rank < rows.size(); ++col) {
    std::size_t p = rank;
    while (p < rows.size() && sgn(rows[p].coef[col]) == 0) ++p;
    if (p == rows.size()) return std::nullopt;  // free column: not a vertex
    std::swap(rows[p], rows[rank]);
    const Rational inv = 1 / rows[rank].coef[col];
    for (auto& v : rows[rank].coef) v *= inv;
    rows[rank].rhs *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || sgn(rows[r].coef[col]) == 0) continue;
      const Rational f = rows[r].coef[col];
      for (std::size_t c = col; c < vars; ++c) rows[r].coef[c] -= f * rows[rank].coef[c];
      rows[r].rhs -= f * rows[rank].rhs;
    }
    pivot_col.push_back(col);
    ++rank;
  }
  if (rank < vars) return std::nullopt;
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (sgn(rows[r].rhs) != 0) return std::nullopt;
  std::vector<Rational> x(vars);
  for (std::size_t r = 0; r < rank; ++r) x[pivot_col[r]] = rows[r].rhs;
  return x;
}

std::size_t equality_rank(const System& s) {
  std::vector<Row> rows = s.equalities;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < s.vars && rank < rows.size(); ++col) {
    std::size_t p = rank;
    while (p < rows.size() && sgn(rows[p].coef[col]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (sgn(rows[r].coef[col]) == 0) continue;
      const Rational f = rows[r].coef[col] / rows[rank].coef[col];
      for (std::size_t c = col; c < s.vars; ++c) rows[r].coef[c] -= f * rows[rank].coef[c];
      rows[r].rhs -= f * rows[rank].rhs;
    }
    ++rank;
  }
  return rank;
}

bool admissible(const System& s, const std::vector<Rational>& v) {
  auto dot = [&](const Row& r) {
    Rational sum = 0;
    for (std::size_t i = 0; i < s.vars; ++i)
      if (sgn(r.coef[i]) != 0) sum += r.coef[i] * v[i];
    return sum;
  };
  for (const auto& r : s.equalities)
    if (dot(r) != r.rhs) return false;
  for (const auto& r : s.inequalities)
    if (dot(r) < r.rhs) return false;
  return true;
}

double binomial(std::size_t n, std::size_t k) {
  double b = 1;
  for (std::size_t i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

// All vertices of the polyhedron.
std::vector<std::vector<Rational>> vertices(const System& s, std::size_t max_bases) {
  const std::size_t rank = equality_rank(s);
  if (rank > s.vars) return {};
  const std::size_t need = s.vars - rank;
  const std::size_t m = s.inequalities.size();
  if (need > m) return {};
  if (binomial(m, need) > static_cast<double>(max_bases))
    throw SizeLimitError("vertex oracle: too many candidate bases");

  std::vector<std::vector<Rational>> out;
  std::vector<std::size_t> pick(need);
  for (std::size_t i = 0; i < need; ++i) pick[i] = i;
  for (;;) {
    std::vector<Row> rows = s.equalities;
    for (auto i : pick) rows.push_back(s.inequalities[i]);
    if (auto v = solve_exact(std::move(rows), s.vars); v && admissible(s, *v)) out.push_back(std::move(*v));
    // next combination
    std::size_t i = need;
    while (i > 0 && pick[i - 1] == m - need + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < need; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

// Axiom rows over `vars` columns (worlds first). Point intervals become equalities.
void add_axiom_rows(System& s, const KnowledgeBase& kb, const WorldSpace& ws) {
  for (const auto& a : kb.axioms) {
    const Mask joint = membership(a.consequent && a.antecedent, ws);
    const Mask cond = membership(a.antecedent, ws);
    auto row = [&](const Rational& bound) {
      Row r{std::vector<Rational>(s.vars), 0};
      for (std::size_t i = 0; i < ws.size(); ++i) r.coef[i] = Rational(joint[i]) - bound * cond[i];
      return r;
    };
    if (a.bounds.is_point()) {
      s.equalities.push_back(row(a.bounds.lower()));
      continue;
    }
    if (a.bounds.lower() > 0) s.inequalities.push_back(row(a.bounds.lower()));
    if (a.bounds.upper() < 1) {
      Row r = row(a.bounds.upper());
      for (auto& c : r.coef) c = -c;
      s.inequalities.push_back(std::move(r));
    }
  }
  for (std::size_t i = 0; i < s.vars; ++i) {
    Row r{std::vector<Rational>(s.vars), 0};
    r.coef[i] = 1;
    s.inequalities.push_back(std::move(r));
  }
}

Rational objective(const Mask& m, const std::vector<Rational>& v) {
  Rational sum = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) sum += v[i];
  return sum;
}

}  // namespace

QueryResult vertex_bounds(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target, const Sentence& given,
                          std::size_t max_bases) {
  const std::size_t n = ws.size();
  const Mask cond = membership(given, ws);
  const Mask num = membership(target && given, ws);

  // Distributions: sum x = 1.
  System plain;
  plain.vars = n;
  add_axiom_rows(plain, kb, ws);
  plain.equalities.push_back({std::vector<Rational>(n, Rational(1)), 1});
  const auto plain_vertices = vertices(plain, max_bases);

  QueryResult out;
  if (plain_vertices.empty()) {
    out.status = QueryStatus::Infeasible;
    return out;
  }
  const bool unconditional = std::all_of(cond.begin(), cond.end(), [](char c) { return c != 0; });
  if (unconditional) {
    Rational lo = objective(num, plain_vertices.front()), hi = lo;
    for (const auto& v : plain_vertices) {
      const Rational f = objective(num, v);
      lo = min(lo, f);
      hi = max(hi, f);
    }
    out.status = QueryStatus::Determined;
    out.interval = ProbabilityInterval(lo, hi);
    out.lower_attained = out.upper_attained = true;
    return out;
  }

  Rational best_condition = 0;
  for (const auto& v : plain_vertices) best_condition = max(best_condition, objective(cond, v));
  if (sgn(best_condition) == 0) {
    out.status = QueryStatus::VacuousByZeroAntecedent;
    out.interval = ProbabilityInterval::vacuous();
    return out;
  }

  // Homogenized: variables y_0..y_{n-1}, t; sum y = t; sum_cond y = 1.
  System scaled;
  scaled.vars = n + 1;
  add_axiom_rows(scaled, kb, ws);
  Row total{std::vector<Rational>(n + 1, Rational(1)), 0};
  total.coef[n] = -1;
  scaled.equalities.push_back(std::move(total));
  Row normal{std::vector<Rational>(n + 1), 1};
  for (std::size_t i = 0; i < n; ++i) normal.coef[i] = cond[i];
  scaled.equalities.push_back(std::move(normal));
  const auto scaled_vertices = vertices(scaled, max_bases);
  if (scaled_vertices.empty()) throw Error("vertex oracle: homogenized system has no vertex");
  Rational lo = objective(num, scaled_vertices.front()), hi = lo;
  for (const auto& v : scaled_vertices) {
    const Rational f = objective(num, v);
    lo = min(lo, f);
    hi = max(hi, f);
  }
  out.status = QueryStatus::Determined;
  out.interval = ProbabilityInterval(lo, hi);
  out.lower_attained = out.upper_attained = true;
  return out;
}

}  // namespace cpi::oracle
