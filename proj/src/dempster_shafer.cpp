#include "cpi/dempster_shafer.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "cpi/entailment.hpp"
#include "cpi/error.hpp"

namespace cpi {

Frame::Frame(std::vector<std::string> elements, std::size_t cap) : elements_(std::move(elements)) {
  if (elements_.empty()) throw Error("frame of discernment must be nonempty");
  if (elements_.size() > cap || elements_.size() > 30)
    throw SizeLimitError("frame of " + std::to_string(elements_.size()) + " elements exceeds the cap of " +
                         std::to_string(cap));
  std::set<std::string> seen;
  for (const auto& e : elements_)
    if (!seen.insert(e).second) throw Error("duplicate frame element '" + e + "'");
}

Subset Frame::subset(const std::vector<std::string>& names) const {
  Subset s = 0;
  for (const auto& n : names) {
    auto it = std::find(elements_.begin(), elements_.end(), n);
    if (it == elements_.end()) throw Error("'" + n + "' is not a frame element");
    s |= Subset{1} << (it - elements_.begin());
  }
  return s;
}

std::string Frame::to_string(Subset s) const {
  if (s == full()) return "Θ";
  if (s == 0) return "∅";
  std::string out = "{";
  bool first = true;
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (!(s >> k & 1U)) continue;
    if (!first) out += ",";
    first = false;
    out += elements_[k];
  }
  return out + "}";
}

MassFunction::MassFunction(Frame frame, const std::map<Subset, Rational>& masses)
    : frame_(std::move(frame)), masses_(frame_.subset_count()) {
  Rational total = 0;
  for (auto [s, v] : masses) {
    v.canonicalize();
    if (s > frame_.full()) throw Error("subset outside the frame");
    if (s == 0 && sgn(v) != 0) throw Error("the empty set cannot carry mass");
    if (v < 0) throw Error("negative mass on " + frame_.to_string(s));
    masses_[s] += v;
    total += v;
  }
  if (total != 1) throw Error("masses sum to " + to_fraction_string(total) + ", not 1");
}

MassFunction MassFunction::vacuous(const Frame& frame) { return MassFunction(frame, {{frame.full(), Rational(1)}}); }

std::vector<Subset> MassFunction::focal_sets() const {
  std::vector<Subset> out;
  for (Subset s = 0; s < masses_.size(); ++s)
    if (sgn(masses_[s]) > 0) out.push_back(s);
  return out;
}

namespace {

// In-place subset-sum (zeta) transform: f(A) <- sum_{B ⊆ A} f(B).
void zeta(std::vector<Rational>& f, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    for (Subset s = 0; s < f.size(); ++s)
      if (s >> k & 1U) f[s] += f[s ^ (Subset{1} << k)];
}

// Inverse of zeta.
void moebius(std::vector<Rational>& f, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    for (Subset s = 0; s < f.size(); ++s)
      if (s >> k & 1U) f[s] -= f[s ^ (Subset{1} << k)];
}

}  // namespace

LowerEnvelope::LowerEnvelope(Frame frame, std::vector<Rational> lower)
    : frame_(std::move(frame)), lower_(std::move(lower)) {
  if (lower_.size() != frame_.subset_count()) throw Error("envelope must list every subset of the frame");
  for (auto& v : lower_) v.canonicalize();
  if (sgn(lower_[0]) != 0) throw Error("lower probability of the empty set must be 0");
  if (lower_[frame_.full()] != 1) throw Error("lower probability of the whole frame must be 1");
  for (Subset s = 0; s < lower_.size(); ++s) {
    if (lower_[s] < 0 || lower_[s] > 1) throw Error("lower probability outside [0, 1]");
    if (lower_[s] + lower_[frame_.full() & ~s] > 1) throw Error("incoherent envelope at " + frame_.to_string(s));
  }
}

LowerEnvelope LowerEnvelope::from_belief(const BeliefFunction& bel) { return LowerEnvelope(bel.frame(), bel.table()); }

BeliefFunction bel_from_mass(const MassFunction& m) {
  std::vector<Rational> bel = m.table();
  zeta(bel, m.frame().size());
  return BeliefFunction(m.frame(), std::move(bel));
}

std::variant<MassFunction, NotRepresentable> mass_from_bel(const LowerEnvelope& lower) {
  std::vector<Rational> m = lower.table();
  moebius(m, lower.frame().size());
  for (Subset s = 0; s < m.size(); ++s)
    if (m[s] < 0) return NotRepresentable{s, m[s]};
  std::map<Subset, Rational> masses;
  for (Subset s = 1; s < m.size(); ++s)
    if (sgn(m[s]) != 0) masses.emplace(s, m[s]);
  return MassFunction(lower.frame(), masses);
}

Combination dempster_combine(const MassFunction& m1, const MassFunction& m2) {
  if (!(m1.frame() == m2.frame())) throw Error("cannot combine mass functions on different frames");
  const Frame& frame = m1.frame();
  std::vector<Rational> joint(frame.subset_count());
  Rational conflict = 0;
  const auto f1 = m1.focal_sets();
  const auto f2 = m2.focal_sets();
  for (Subset b : f1)
    for (Subset c : f2) {
      const Rational w = m1.mass(b) * m2.mass(c);
      if ((b & c) == 0) conflict += w;
      else joint[b & c] += w;
    }
  if (conflict == 1) throw TotalConflictError(0, 1);
  const Rational scale = 1 / (1 - conflict);
  std::map<Subset, Rational> masses;
  for (Subset s = 1; s < joint.size(); ++s)
    if (sgn(joint[s]) != 0) masses.emplace(s, joint[s] * scale);
  return {MassFunction(frame, masses), conflict};
}

EvidenceCombination combine_evidence(const std::vector<MassFunction>& sources) {
  if (sources.empty()) throw Error("no evidence sources to combine");
  EvidenceCombination out{sources.front(), {}};
  for (std::size_t i = 1; i < sources.size(); ++i) {
    try {
      auto step = dempster_combine(out.mass, sources[i]);
      out.mass = std::move(step.mass);
      out.conflicts.push_back(step.conflict);
    } catch (const TotalConflictError&) {
      throw TotalConflictError(i - 1, i);
    }
  }
  return out;
}

LowerEnvelope envelope_from_entailment(const KnowledgeBase& kb, const WorldSpace& ws, const FrameMapping& mapping) {
  std::vector<std::string> names;
  std::vector<WorldSet> sets;
  std::vector<int> owner(ws.size(), -1);
  for (const auto& [name, sentence] : mapping) {
    ws.check_atoms(sentence);
    names.push_back(name);
    sets.push_back(extension(sentence, ws));
    for (auto w : sets.back()) {
      if (owner[w] != -1)
        throw FrameMappingError("frame elements '" + names[static_cast<std::size_t>(owner[w])] + "' and '" + name +
                                "' are not mutually exclusive under the background theory");
      owner[w] = static_cast<int>(names.size() - 1);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end())
    throw FrameMappingError("frame elements are not exhaustive under the background theory");

  Frame frame(names);
  const LinearEntailment linear(kb, ws);
  if (!linear.feasible()) throw InfeasibleError("the axioms admit no probability distribution");
  std::vector<Rational> lower(frame.subset_count());
  for (Subset s = 1; s < lower.size(); ++s) {
    WorldSet set;
    for (std::size_t k = 0; k < names.size(); ++k)
      if (s >> k & 1U) set.insert(set.end(), sets[k].begin(), sets[k].end());
    std::sort(set.begin(), set.end());
    lower[s] = linear.unconditional(set).interval->lower();
  }
  return LowerEnvelope(frame, std::move(lower));
}

Frame frame_of(const KnowledgeBase& kb) {
  if (kb.frame.empty()) throw FrameMappingError("the knowledge base declares no frame");
  std::vector<std::string> names;
  for (const auto& e : kb.frame) names.push_back(e.name);
  return Frame(names);
}

FrameMapping mapping_of(const KnowledgeBase& kb) {
  FrameMapping out;
  if (kb.frame.empty()) {
    // Without a frame line the atoms themselves are the hypotheses.
    for (const auto& a : kb.atoms) out.emplace_back(a, Sentence::atom(a));
    return out;
  }
  for (const auto& e : kb.frame) {
    if (!e.sentence) throw FrameMappingError("frame element '" + e.name + "' is not mapped to a sentence");
    out.emplace_back(e.name, *e.sentence);
  }
  return out;
}

MassFunction mass_of(const MassDeclaration& declaration, const Frame& frame) {
  std::map<Subset, Rational> masses;
  for (const auto& [names, value] : declaration.focal) masses[frame.subset(names)] += value;
  return MassFunction(frame, masses);
}

}  // namespace cpi
