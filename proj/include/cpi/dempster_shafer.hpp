#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cpi/knowledge_base.hpp"
#include "cpi/rational.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

/// Bitmask over frame elements; bit k is element k.
using Subset = std::uint32_t;

inline constexpr std::size_t kDefaultFrameCap = 16;

/// Frame of discernment: mutually exclusive, exhaustive named hypotheses.
class Frame {
 public:
  explicit Frame(std::vector<std::string> elements, std::size_t cap = kDefaultFrameCap);

  std::size_t size() const { return elements_.size(); }
  std::size_t subset_count() const { return std::size_t{1} << elements_.size(); }
  Subset full() const { return static_cast<Subset>(subset_count() - 1); }
  const std::vector<std::string>& elements() const { return elements_; }

  /// Throws Error for unknown names.
  Subset subset(const std::vector<std::string>& names) const;
  /// "Θ" for the whole frame, "∅" for the empty set, otherwise "{a,b}".
  std::string to_string(Subset s) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<std::string> elements_;
};

/// Basic probability assignment: nonnegative, sums to one, nothing on the empty set.
class MassFunction {
 public:
  /// Throws Error when the masses are not a valid assignment.
  MassFunction(Frame frame, const std::map<Subset, Rational>& masses);

  static MassFunction vacuous(const Frame& frame);

  const Frame& frame() const { return frame_; }
  const Rational& mass(Subset s) const { return masses_.at(s); }
  const std::vector<Rational>& table() const { return masses_; }
  /// Subsets with positive mass, ascending.
  std::vector<Subset> focal_sets() const;

  friend bool operator==(const MassFunction&, const MassFunction&) = default;

 private:
  Frame frame_;
  std::vector<Rational> masses_;
};

class BeliefFunction {
 public:
  const Frame& frame() const { return frame_; }
  const Rational& belief(Subset s) const { return bel_.at(s); }
  Rational plausibility(Subset s) const { return 1 - bel_.at(frame_.full() & ~s); }
  const std::vector<Rational>& table() const { return bel_; }

 private:
  BeliefFunction(Frame frame, std::vector<Rational> bel) : frame_(std::move(frame)), bel_(std::move(bel)) {}
  friend BeliefFunction bel_from_mass(const MassFunction& m);

  Frame frame_;
  std::vector<Rational> bel_;
};

/// Lower probabilities on every subset, with the paired upper probability
/// upper(A) = 1 - lower(complement A).
class LowerEnvelope {
 public:
  /// `lower` is indexed by subset bitmask. Throws Error unless lower(∅)=0,
  /// lower(Θ)=1, values lie in [0,1] and lower(A) + lower(not A) <= 1.
  LowerEnvelope(Frame frame, std::vector<Rational> lower);

  const Frame& frame() const { return frame_; }
  const Rational& lower(Subset s) const { return lower_.at(s); }
  Rational upper(Subset s) const { return 1 - lower_.at(frame_.full() & ~s); }
  const std::vector<Rational>& table() const { return lower_; }

  static LowerEnvelope from_belief(const BeliefFunction& bel);

 private:
  Frame frame_;
  std::vector<Rational> lower_;
};

BeliefFunction bel_from_mass(const MassFunction& m);

/// The envelope is not a belief function: Möbius inversion gives `mass` < 0 on `witness`.
struct NotRepresentable {
  Subset witness;
  Rational mass;
};

/// Möbius inversion m(A) = sum_{B ⊆ A} (-1)^{|A \ B|} lower(B).
std::variant<MassFunction, NotRepresentable> mass_from_bel(const LowerEnvelope& lower);

struct Combination {
  MassFunction mass;
  Rational conflict;  // κ, the mass assigned to empty intersections before normalization
};

/// Normalized Dempster rule. Throws TotalConflictError(0, 1) when κ = 1.
Combination dempster_combine(const MassFunction& m1, const MassFunction& m2);

struct EvidenceCombination {
  MassFunction mass;
  std::vector<Rational> conflicts;  // κ of each successive combination step
};

/// Left fold of dempster_combine. Throws TotalConflictError naming the first
/// offending pair (accumulated prefix index, next source index).
EvidenceCombination combine_evidence(const std::vector<MassFunction>& sources);

/// Frame element name paired with the world-space sentence it denotes.
using FrameMapping = std::vector<std::pair<std::string, Sentence>>;

/// lower(A) = entailed lower probability of the disjunction of A's sentences.
/// Throws FrameMappingError unless the sentences partition the world space.
LowerEnvelope envelope_from_entailment(const KnowledgeBase& kb, const WorldSpace& ws, const FrameMapping& mapping);

/// Frame and mapping from a knowledge base's `frame` declaration. With no frame,
/// mapping_of uses one element per atom.
Frame frame_of(const KnowledgeBase& kb);
FrameMapping mapping_of(const KnowledgeBase& kb);
MassFunction mass_of(const MassDeclaration& declaration, const Frame& frame);

}  // namespace cpi
