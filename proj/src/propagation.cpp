#include "cpi/propagation.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cpi/error.hpp"

namespace cpi {

RuleSet RuleSet::parse(std::string_view list) {
  RuleSet r{false, false, false, false, false};
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    std::string_view name = list.substr(start, end - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (name == "sound") r = RuleSet::sound();
    else if (name == "fuzzy") r = RuleSet::fuzzy();
    else if (name == "negation") r.negation = true;
    else if (name == "frechet") r.frechet_conjunction = r.frechet_disjunction = true;
    else if (name == "frechet_conjunction") r.frechet_conjunction = true;
    else if (name == "frechet_disjunction") r.frechet_disjunction = true;
    else if (name == "conditional_chain") r.conditional_chain = true;
    else if (name == "fuzzy_minmax") r.fuzzy_minmax = true;
    else if (!name.empty()) throw Error("unknown rule '" + std::string(name) + "'");
    start = end + 1;
  }
  r.validate();
  return r;
}

void RuleSet::validate() const {
  if (fuzzy_minmax && (frechet_conjunction || frechet_disjunction))
    throw Error("fuzzy_minmax and the Fréchet rules cannot run together");
}

std::string RuleSet::to_string() const {
  std::vector<std::string> names;
  if (negation) names.push_back("negation");
  if (frechet_conjunction) names.push_back("frechet_conjunction");
  if (frechet_disjunction) names.push_back("frechet_disjunction");
  if (conditional_chain) names.push_back("conditional_chain");
  if (fuzzy_minmax) names.push_back("fuzzy_minmax");
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ",") + n;
  return out;
}

BoundsTable::BoundsTable(const std::vector<Sentence>& tracked) {
  for (const auto& s : tracked) track(s);
}

void BoundsTable::track(const Sentence& s) {
  if (s.kind() == Sentence::Kind::True) entries_.emplace(s, ProbabilityInterval::point(1));
  else if (s.kind() == Sentence::Kind::False) entries_.emplace(s, ProbabilityInterval::point(0));
  else entries_.emplace(s, ProbabilityInterval::vacuous());
}

const ProbabilityInterval& BoundsTable::at(const Sentence& s) const {
  auto it = entries_.find(s);
  if (it == entries_.end()) throw Error("sentence " + s.to_string() + " is not tracked");
  return it->second;
}

bool BoundsTable::narrow(const Sentence& s, const ProbabilityInterval& bound, std::string_view rule) {
  auto it = entries_.find(s);
  if (it == entries_.end()) return false;
  auto next = it->second.intersect(bound);
  if (!next) throw InconsistencySignal(std::string(rule), s.to_string());
  if (*next == it->second) return false;
  it->second = *next;
  return true;
}

namespace {

ProbabilityInterval clamped(const Rational& lo, const Rational& hi) {
  return ProbabilityInterval(max(Rational(0), lo), min(Rational(1), hi));
}

// The tracked binary conjunction/disjunction of a and b, in either operand order.
const Sentence* tracked_binary(const BoundsTable& t, Sentence::Kind kind, const Sentence& a, const Sentence& b,
                               Sentence& storage) {
  const std::vector<Sentence> orders[2] = {{a, b}, {b, a}};
  for (const auto& ops : orders) {
    storage = kind == Sentence::Kind::And ? Sentence::conjunction(ops) : Sentence::disjunction(ops);
    if (t.tracks(storage)) return &storage;
  }
  return nullptr;
}

}  // namespace

bool apply_rule_negation(BoundsTable& table, const Sentence& s) {
  const Sentence negated = !s;
  if (!table.tracks(s) || !table.tracks(negated)) return false;
  const auto& a = table.at(s);
  bool changed = table.narrow(negated, ProbabilityInterval(1 - a.upper(), 1 - a.lower()), "negation");
  const auto& n = table.at(negated);
  changed |= table.narrow(s, ProbabilityInterval(1 - n.upper(), 1 - n.lower()), "negation");
  return changed;
}

bool apply_rule_frechet(BoundsTable& table, const Sentence& a, const Sentence& b, bool conjunction,
                        bool disjunction) {
  if (!table.tracks(a) || !table.tracks(b)) return false;
  const ProbabilityInterval ia = table.at(a);
  const ProbabilityInterval ib = table.at(b);
  bool changed = false;
  Sentence storage;
  if (conjunction) {
    if (auto* conj = tracked_binary(table, Sentence::Kind::And, a, b, storage))
      changed |= table.narrow(*conj, clamped(ia.lower() + ib.lower() - 1, min(ia.upper(), ib.upper())),
                              "frechet_conjunction");
  }
  if (disjunction) {
    if (auto* disj = tracked_binary(table, Sentence::Kind::Or, a, b, storage))
      changed |= table.narrow(*disj, clamped(max(ia.lower(), ib.lower()), ia.upper() + ib.upper()),
                              "frechet_disjunction");
  }
  return changed;
}

bool apply_rule_fuzzy(BoundsTable& table, const Sentence& a, const Sentence& b, bool conjunction, bool disjunction) {
  if (!table.tracks(a) || !table.tracks(b)) return false;
  const ProbabilityInterval ia = table.at(a);
  const ProbabilityInterval ib = table.at(b);
  if (!ia.is_point() || !ib.is_point())
    throw NonPointInputError("fuzzy rule needs point values for " + a.to_string() + " and " + b.to_string());
  bool changed = false;
  Sentence storage;
  if (conjunction) {
    if (auto* conj = tracked_binary(table, Sentence::Kind::And, a, b, storage))
      changed |= table.narrow(*conj, ProbabilityInterval::point(min(ia.lower(), ib.lower())), "fuzzy_minmax");
  }
  if (disjunction) {
    if (auto* disj = tracked_binary(table, Sentence::Kind::Or, a, b, storage))
      changed |= table.narrow(*disj, ProbabilityInterval::point(max(ia.lower(), ib.lower())), "fuzzy_minmax");
  }
  return changed;
}

bool apply_rule_conditional_chain(BoundsTable& table, const CpiAxiom& axiom) {
  if (!table.tracks(axiom.consequent) || !table.tracks(axiom.antecedent)) return false;
  const Rational lb = table.at(axiom.antecedent).lower();
  const Rational& q = axiom.bounds.lower();
  const Rational& r = axiom.bounds.upper();
  return table.narrow(axiom.consequent, clamped(q * lb, 1 - (1 - r) * lb), "conditional_chain");
}

PropagationResult propagate_fixpoint(const KnowledgeBase& kb, const RuleSet& rules, const std::vector<Sentence>& tracked,
                                     std::size_t sweep_cap, bool reverse_order) {
  rules.validate();
  PropagationResult out;
  out.table = BoundsTable(tracked);
  for (const auto& a : kb.axioms) {
    out.table.track(a.consequent);
    if (!a.antecedent.is_true()) out.table.track(a.antecedent);
  }
  for (const auto& a : kb.axioms)
    if (a.antecedent.is_true()) out.table.narrow(a.consequent, a.bounds, "axiom");

  BoundsTable& table = out.table;
  std::vector<std::function<bool()>> schedule;
  for (const auto& [s, _] : table.entries()) {
    const auto kids = s.children();
    if (rules.negation && s.kind() == Sentence::Kind::Not && table.tracks(kids[0])) {
      const Sentence inner = kids[0];
      schedule.push_back([&table, inner] { return apply_rule_negation(table, inner); });
    }
    const bool binary = kids.size() == 2 && table.tracks(kids[0]) && table.tracks(kids[1]);
    if (!binary) continue;
    const Sentence a = kids[0];
    const Sentence b = kids[1];
    if (s.kind() == Sentence::Kind::And || s.kind() == Sentence::Kind::Or) {
      const bool conj = s.kind() == Sentence::Kind::And;
      if ((conj && rules.frechet_conjunction) || (!conj && rules.frechet_disjunction))
        schedule.push_back([&table, a, b, conj] { return apply_rule_frechet(table, a, b, conj, !conj); });
      if (rules.fuzzy_minmax)
        schedule.push_back([&table, a, b, conj] {
          if (!table.at(a).is_point() || !table.at(b).is_point()) return false;
          return apply_rule_fuzzy(table, a, b, conj, !conj);
        });
    }
  }
  if (rules.conditional_chain)
    for (const auto& a : kb.axioms)
      if (!a.antecedent.is_true())
        schedule.push_back([&table, axiom = a] { return apply_rule_conditional_chain(table, axiom); });
  if (reverse_order) std::reverse(schedule.begin(), schedule.end());

  while (out.sweeps < sweep_cap) {
    ++out.sweeps;
    bool changed = false;
    for (auto& step : schedule) changed |= step();
    if (!changed) {
      out.reached_fixpoint = true;
      break;
    }
  }
  return out;
}

std::vector<Sentence> subformula_closure(const std::vector<Sentence>& tracked) {
  std::set<Sentence> seen;
  std::vector<Sentence> out;
  std::function<void(const Sentence&)> visit = [&](const Sentence& s) {
    if (!seen.insert(s).second) return;
    out.push_back(s);
    for (const auto& c : s.children()) visit(c);
  };
  for (const auto& s : tracked) visit(s);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::SoundAndComplete: return "sound_and_complete";
    case Verdict::SoundIncomplete: return "sound_incomplete";
    case Verdict::Unsound: return "unsound";
  }
  return "?";
}

Judgement judge_soundness_completeness(const BoundsTable& propagated,
                                       const std::map<Sentence, ProbabilityInterval>& entailed) {
  if (propagated.size() != entailed.size())
    throw CoverageMismatchError("propagated and entailed tables cover different sentences");
  Judgement j;
  for (const auto& [s, inferred] : propagated.entries()) {
    auto it = entailed.find(s);
    if (it == entailed.end()) throw CoverageMismatchError("no entailed interval for " + s.to_string());
    Verdict v = !inferred.contains(it->second) ? Verdict::Unsound
                : inferred == it->second        ? Verdict::SoundAndComplete
                                                : Verdict::SoundIncomplete;
    j.per_sentence.emplace_back(s, v);
    j.overall = std::max(j.overall, v);
  }
  return j;
}

}  // namespace cpi
