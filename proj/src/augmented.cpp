#include "cpi/augmented.hpp"

#include <algorithm>
#include <queue>

#include "cpi/error.hpp"
#include "cpi/simplex.hpp"

namespace cpi {

namespace {

Rational aggregate_value(const Sentence& s, const std::vector<Rational>& x, const WorldSpace& ws) {
  Rational sum = 0;
  for (auto i : extension(s, ws)) sum += x.at(i);
  return sum;
}

Rational term_value(const ProductTerm& t, const std::vector<Rational>& x, const WorldSpace& ws) {
  return aggregate_value(t.u, x, ws) * aggregate_value(t.v, x, ws);
}

Rational shortfall(const Rational& residual, Relation relation) {
  switch (relation) {
    case Relation::Equal: return abs(residual);
    case Relation::LessEqual: return residual > 0 ? residual : Rational(0);
    case Relation::GreaterEqual: return residual < 0 ? Rational(-residual) : Rational(0);
  }
  return 0;
}

}  // namespace

Rational BilinearConstraint::residual(const std::vector<Rational>& x, const WorldSpace& ws) const {
  return term_value(left, x, ws) - term_value(right, x, ws);
}

Rational BilinearConstraint::violation(const std::vector<Rational>& x, const WorldSpace& ws) const {
  return shortfall(residual(x, ws), relation);
}

std::vector<BilinearConstraint> encode_assumption(const AssumptionConstraint& assumption, const WorldSpace& ws) {
  struct Visitor {
    const WorldSpace& ws;
    std::vector<BilinearConstraint> operator()(const CondIndependence& c) const {
      for (const auto* s : {&c.first, &c.second, &c.given}) ws.check_atoms(*s);
      // Cleared denominators: p(C&D&G) p(G) = p(C&G) p(D&G).
      const ProductTerm left{Sentence::conjunction({c.first, c.second, c.given}), c.given};
      const ProductTerm right{c.first && c.given, c.second && c.given};
      if (c.given.is_true())
        return {{ProductTerm{c.first && c.second, Sentence::truth()}, Relation::Equal,
                 ProductTerm{c.first, c.second}}};
      return {{left, Relation::Equal, right}};
    }
    std::vector<BilinearConstraint> operator()(const PositiveCorrelation& c) const {
      ws.check_atoms(c.a);
      ws.check_atoms(c.b);
      return {{ProductTerm{c.a && c.b, Sentence::truth()}, Relation::GreaterEqual, ProductTerm{c.a, c.b}}};
    }
    std::vector<BilinearConstraint> operator()(const NegativeCorrelation& c) const {
      ws.check_atoms(c.a);
      ws.check_atoms(c.b);
      return {{ProductTerm{c.a && c.b, Sentence::truth()}, Relation::LessEqual, ProductTerm{c.a, c.b}}};
    }
  };
  return std::visit(Visitor{ws}, assumption);
}

// ---------------------------------------------------------------------------
// Relaxation model

namespace {

using Terms = std::map<std::size_t, Rational>;

void add_set(Terms& terms, const WorldSet& set, const Rational& coef) {
  if (sgn(coef) == 0) return;
  for (auto i : set) terms[i] += coef;
}

std::vector<std::pair<std::size_t, Rational>> flatten(const Terms& terms) {
  std::vector<std::pair<std::size_t, Rational>> out;
  for (const auto& [i, c] : terms)
    if (sgn(c) != 0) out.emplace_back(i, c);
  return out;
}

// Envelope rows for z = U V in homogenized form; `scale` is the column
// multiplying constants (t), or nullopt when constants go to the rhs.
struct EnvelopeRow {
  Terms terms;
  Relation relation;
  Rational constant;  // constant term on the left-hand side
};

std::vector<EnvelopeRow> envelope(std::size_t z, const WorldSet& u, const ProbabilityInterval& bu, const WorldSet& v,
                                  const ProbabilityInterval& bv) {
  auto row = [&](const Rational& cu_v, const Rational& cv_u, Relation rel) {
    // z - cu_v * V - cv_u * U + cu_v * cv_u (rel) 0
    EnvelopeRow r{{}, rel, cu_v * cv_u};
    r.terms[z] += 1;
    add_set(r.terms, v, -cu_v);
    add_set(r.terms, u, -cv_u);
    return r;
  };
  return {row(bu.lower(), bv.lower(), Relation::GreaterEqual), row(bu.upper(), bv.upper(), Relation::GreaterEqual),
          row(bu.upper(), bv.lower(), Relation::LessEqual), row(bu.lower(), bv.upper(), Relation::LessEqual)};
}

struct ModelProduct {
  std::size_t u;
  std::size_t v;
};

// A constraint side: a product variable, or a single linear aggregate.
struct ModelSide {
  std::optional<std::size_t> product;
  std::size_t aggregate = 0;
};

struct ModelConstraint {
  ModelSide left;
  Relation relation;
  ModelSide right;
};

class Model {
 public:
  Model(const KnowledgeBase& kb, const WorldSpace& ws) : ws_(ws), k_rows_(linearize(kb.axioms, ws)) {
    for (const auto& a : kb.assumptions)
      for (const auto& c : encode_assumption(a, ws)) add(c);
  }

  const WorldSpace& ws() const { return ws_; }
  const std::vector<LinearConstraint>& k_rows() const { return k_rows_; }
  std::size_t aggregate_count() const { return aggregates_.size(); }
  const Sentence& aggregate_sentence(std::size_t i) const { return sentences_[i]; }
  const WorldSet& aggregate_set(std::size_t i) const { return aggregates_[i]; }
  const std::vector<ModelProduct>& products() const { return products_; }
  const std::vector<ModelConstraint>& constraints() const { return constraints_; }
  bool has_products() const { return !products_.empty() || !constraints_.empty(); }

  std::size_t t_column() const { return ws_.size() + products_.size(); }
  std::size_t columns() const { return t_column() + 1; }

  LpProblem relaxation(const std::vector<ProbabilityInterval>& box, const WorldSet& given) const {
    const std::size_t n = ws_.size();
    const std::size_t t = t_column();
    LpProblem p;
    p.variables = columns();
    for (const auto& c : k_rows_) p.add_row(c);
    {
      Terms total;
      add_set(total, ws_.all(), 1);
      total[t] -= 1;
      p.add_row(flatten(total), Relation::Equal, 0);
      Terms cond;
      add_set(cond, given, 1);
      p.add_row(flatten(cond), Relation::Equal, 1);
    }
    auto push = [&](Terms terms, Relation rel, const Rational& constant) {
      if (sgn(constant) != 0) terms[t] += constant;
      p.add_row(flatten(terms), rel, 0);
    };
    for (std::size_t a = 0; a < aggregates_.size(); ++a) {
      if (box[a].lower() > 0) {
        Terms r;
        add_set(r, aggregates_[a], 1);
        push(std::move(r), Relation::GreaterEqual, -box[a].lower());
      }
      if (box[a].upper() < 1) {
        Terms r;
        add_set(r, aggregates_[a], 1);
        push(std::move(r), Relation::LessEqual, -box[a].upper());
      }
    }
    for (std::size_t k = 0; k < products_.size(); ++k) {
      const auto& pr = products_[k];
      for (auto& row : envelope(n + k, aggregates_[pr.u], box[pr.u], aggregates_[pr.v], box[pr.v]))
        push(std::move(row.terms), row.relation, row.constant);
    }
    for (const auto& c : constraints_) {
      Terms r;
      side_terms(r, c.left, 1);
      side_terms(r, c.right, -1);
      push(std::move(r), c.relation, 0);
    }
    return p;
  }

  // Unscaled world distribution recovered from a relaxation solution.
  std::vector<Rational> distribution(const std::vector<Rational>& sol) const {
    std::vector<Rational> x(ws_.size());
    const Rational& t = sol[t_column()];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sol[i] / t;
    return x;
  }

  Rational aggregate_at(std::size_t a, const std::vector<Rational>& x) const {
    Rational s = 0;
    for (auto i : aggregates_[a]) s += x[i];
    return s;
  }

  Rational constraint_violation(const std::vector<Rational>& x) const {
    Rational worst = 0;
    for (const auto& c : constraints_) {
      const Rational v = shortfall(side_value(c.left, x) - side_value(c.right, x), c.relation);
      if (v > worst) worst = v;
    }
    return worst;
  }

 private:
  std::size_t aggregate(const Sentence& s) {
    if (auto it = index_.find(s); it != index_.end()) return it->second;
    index_.emplace(s, aggregates_.size());
    sentences_.push_back(s);
    aggregates_.push_back(extension(s, ws_));
    return aggregates_.size() - 1;
  }

  ModelSide side(const ProductTerm& t) {
    if (t.is_linear()) return {std::nullopt, aggregate(t.u.is_true() ? t.v : t.u)};
    std::size_t u = aggregate(t.u);
    std::size_t v = aggregate(t.v);
    if (u > v) std::swap(u, v);
    for (std::size_t k = 0; k < products_.size(); ++k)
      if (products_[k].u == u && products_[k].v == v) return {k, 0};
    products_.push_back({u, v});
    return {products_.size() - 1, 0};
  }

  void add(const BilinearConstraint& c) { constraints_.push_back({side(c.left), c.relation, side(c.right)}); }

  void side_terms(Terms& r, const ModelSide& s, const Rational& sign) const {
    if (s.product) r[ws_.size() + *s.product] += sign;
    else add_set(r, aggregates_[s.aggregate], sign);
  }

  Rational side_value(const ModelSide& s, const std::vector<Rational>& x) const {
    if (s.product) return aggregate_at(products_[*s.product].u, x) * aggregate_at(products_[*s.product].v, x);
    return aggregate_at(s.aggregate, x);
  }

  const WorldSpace& ws_;
  std::vector<LinearConstraint> k_rows_;
  std::map<Sentence, std::size_t> index_;
  std::vector<Sentence> sentences_;
  std::vector<WorldSet> aggregates_;
  std::vector<ModelProduct> products_;
  std::vector<ModelConstraint> constraints_;
};

struct Node {
  std::vector<ProbabilityInterval> box;
  Rational bound;  // parent's relaxation value; a valid bound for this box
  std::size_t order;
};

struct NodeCompare {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.order > b.order;
  }
};

struct SearchOutcome {
  std::optional<Rational> bound;      // outer bound (minimization); nullopt = proven infeasible
  std::optional<Rational> incumbent;  // best value at a tolerance-feasible point
  bool incumbent_exact = false;
  bool converged = false;
  SolveStats stats;
};

// Picks a split point strictly inside (lo, hi), kept 1% of the width away from both ends.
Rational split_point(const ProbabilityInterval& box, const Rational& at) {
  const Rational width = box.upper() - box.lower();
  const Rational lo = box.lower() + width / 100;
  const Rational hi = box.upper() - width / 100;
  Rational s = std::clamp(at, lo, hi);
  const mpz_class scale = mpz_class(1) << 20;
  Rational scaled = s * scale;
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  Rational nice(rounded, scale);
  nice.canonicalize();
  if (nice >= lo && nice <= hi) return nice;
  return s;
}

// Spatial branch-and-bound minimizing `objective` over the relaxation family.
SearchOutcome minimize(const Model& model, const std::vector<ProbabilityInterval>& root_box, const WorldSet& given,
                       const std::vector<std::pair<std::size_t, Rational>>& objective, const AugmentedOptions& options,
                       std::size_t& node_budget) {
  SearchOutcome out;
  std::priority_queue<Node, std::vector<Node>, NodeCompare> open;
  std::size_t order = 0;
  open.push({root_box, Rational(-1000), order++});
  std::optional<Rational> fathomed_min;

  while (!open.empty()) {
    if (out.incumbent && open.top().bound >= *out.incumbent - options.tolerance) break;
    if (node_budget == 0) break;
    Node node = open.top();
    open.pop();
    --node_budget;
    ++out.stats.nodes;

    LpProblem lp = model.relaxation(node.box, given);
    lp.objective = objective;
    lp.sense = Sense::Minimize;
    const auto sol = solve(lp);
    ++out.stats.lp_solves;
    out.stats.pivots += sol.pivots;
    if (sol.status != LpStatus::Optimal) continue;
    if (out.incumbent && sol.value >= *out.incumbent) continue;

    const auto x = model.distribution(sol.x);
    const Rational violation = model.constraint_violation(x);
    if (violation <= options.tolerance) {
      if (!out.incumbent || sol.value < *out.incumbent) {
        out.incumbent = sol.value;
        out.incumbent_exact = sgn(violation) == 0;
      }
      continue;
    }

    // Branch on the product whose relaxed value strays furthest from the true product.
    const Rational& t = sol.x[model.t_column()];
    std::optional<std::size_t> worst;
    Rational worst_gap = 0;
    for (std::size_t k = 0; k < model.products().size(); ++k) {
      const auto& pr = model.products()[k];
      const Rational z = sol.x[model.ws().size() + k] / t;
      const Rational gap = abs(z - model.aggregate_at(pr.u, x) * model.aggregate_at(pr.v, x));
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = k;
      }
    }
    if (!worst) {
      // Envelopes are exact here, so the point satisfies every constraint.
      out.incumbent = out.incumbent ? min(*out.incumbent, sol.value) : sol.value;
      continue;
    }
    const auto& pr = model.products()[*worst];
    const auto width = [&](std::size_t a) { return node.box[a].upper() - node.box[a].lower(); };
    const std::size_t var = width(pr.u) >= width(pr.v) ? pr.u : pr.v;
    const Rational at = split_point(node.box[var], model.aggregate_at(var, x));

    Node left{node.box, sol.value, order++};
    left.box[var] = ProbabilityInterval(node.box[var].lower(), at);
    Node right{node.box, sol.value, order++};
    right.box[var] = ProbabilityInterval(at, node.box[var].upper());
    open.push(std::move(left));
    open.push(std::move(right));
  }

  if (open.empty()) {
    out.converged = true;
    out.bound = out.incumbent;
  } else {
    const Rational best_open = open.top().bound;
    out.bound = out.incumbent ? min(best_open, *out.incumbent) : best_open;
    out.converged = out.incumbent && best_open >= *out.incumbent - options.tolerance;
  }
  return out;
}

std::vector<ProbabilityInterval> initial_box(const Model& model) {
  const LinearEntailment linear(model.ws(), model.k_rows());
  std::vector<ProbabilityInterval> box;
  for (std::size_t a = 0; a < model.aggregate_count(); ++a)
    box.push_back(*linear.unconditional(model.aggregate_set(a)).interval);
  return box;
}

std::vector<std::pair<std::size_t, Rational>> objective_terms(const WorldSet& set, const Rational& sign) {
  std::vector<std::pair<std::size_t, Rational>> out;
  for (auto i : set) out.emplace_back(i, sign);
  return out;
}

}  // namespace

std::vector<LinearConstraint> relax_mccormick(const BilinearConstraint& c, const WorldSpace& ws,
                                              const AggregateBoxes& boxes, std::size_t first_product_variable) {
  auto box_of = [&](const Sentence& s) {
    auto it = boxes.find(s);
    return it == boxes.end() ? ProbabilityInterval::vacuous() : it->second;
  };
  std::vector<LinearConstraint> out;
  Terms link;
  std::size_t next = first_product_variable;
  auto side = [&](const ProductTerm& term, const Rational& sign) {
    if (term.is_linear()) {
      add_set(link, extension(term.u.is_true() ? term.v : term.u, ws), sign);
      return;
    }
    const std::size_t z = next++;
    for (auto& row : envelope(z, extension(term.u, ws), box_of(term.u), extension(term.v, ws), box_of(term.v))) {
      LinearConstraint lc;
      for (auto& [i, v] : row.terms)
        if (sgn(v) != 0) lc.coefficients[i] = v;
      lc.relation = row.relation;
      lc.rhs = -row.constant;
      out.push_back(std::move(lc));
    }
    link[z] += sign;
  };
  side(c.left, 1);
  side(c.right, -1);
  LinearConstraint tie;
  for (auto& [i, v] : link)
    if (sgn(v) != 0) tie.coefficients[i] = v;
  tie.relation = c.relation;
  tie.rhs = 0;
  out.push_back(std::move(tie));
  return out;
}

AugmentedResult entail_augmented(const KnowledgeBase& kb, const WorldSpace& ws, const Sentence& target,
                                 const Sentence& given, const AugmentedOptions& options) {
  ws.check_atoms(target);
  ws.check_atoms(given);
  const Model model(kb, ws);
  AugmentedResult out;
  if (!model.has_products()) {
    const LinearEntailment linear(ws, model.k_rows());
    if (!linear.feasible()) throw InfeasibleAugmentedError("the axioms admit no probability distribution");
    out.result = linear.conditional(target, given);
    out.status = AugmentedStatus::Converged;
    out.gap = 0;
    return out;
  }
  {
    const LinearEntailment linear(ws, model.k_rows());
    if (!linear.feasible()) throw InfeasibleAugmentedError("the axioms admit no probability distribution");
  }

  const auto box = initial_box(model);
  const WorldSet all = ws.all();
  const WorldSet given_set = extension(given, ws);
  const WorldSet numerator = extension(target && given, ws);
  std::size_t budget = options.node_cap;

  SolveStats stats;
  if (given_set.size() != all.size()) {
    // Largest attainable p(given) over the relaxation.
    auto probe = minimize(model, box, all, objective_terms(given_set, -1), options, budget);
    stats += probe.stats;
    if (!probe.bound) throw InfeasibleAugmentedError("the axioms and assumptions admit no probability distribution");
    if (sgn(*probe.bound) == 0) {
      out.result.status = QueryStatus::VacuousByZeroAntecedent;
      out.result.interval = ProbabilityInterval::vacuous();
      out.result.stats = stats;
      out.status = AugmentedStatus::Converged;
      out.gap = 0;
      return out;
    }
  }

  auto lo = minimize(model, box, given_set, objective_terms(numerator, 1), options, budget);
  auto hi = minimize(model, box, given_set, objective_terms(numerator, -1), options, budget);
  stats += lo.stats;
  stats += hi.stats;
  if (!lo.bound || !hi.bound)
    throw InfeasibleAugmentedError("the axioms and assumptions admit no probability distribution");

  const Rational lower = max(Rational(0), *lo.bound);
  const Rational upper = min(Rational(1), -*hi.bound);
  out.result.status = QueryStatus::Determined;
  out.result.interval = ProbabilityInterval(lower, upper);
  out.result.lower_attained = lo.incumbent && lo.incumbent_exact && *lo.incumbent == *lo.bound;
  out.result.upper_attained = hi.incumbent && hi.incumbent_exact && *hi.incumbent == *hi.bound;
  out.result.stats = stats;
  out.status = lo.converged && hi.converged ? AugmentedStatus::Converged : AugmentedStatus::OuterBound;
  const Rational lo_gap = lo.incumbent ? Rational(*lo.incumbent - *lo.bound) : Rational(1);
  const Rational hi_gap = hi.incumbent ? Rational(*hi.incumbent - *hi.bound) : Rational(1);
  out.gap = max(lo_gap, hi_gap);
  return out;
}

bool augmented_feasible(const KnowledgeBase& kb, const WorldSpace& ws, const AugmentedOptions& options) {
  const Model model(kb, ws);
  const LinearEntailment linear(ws, model.k_rows());
  if (!linear.feasible()) return false;
  if (!model.has_products()) return true;
  std::size_t budget = options.node_cap;
  const auto outcome = minimize(model, initial_box(model), ws.all(), {}, options, budget);
  return outcome.bound.has_value();
}

}  // namespace cpi
