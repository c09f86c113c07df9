#include "cpi/diagnosis.hpp"

#include "cpi/augmented.hpp"
#include "cpi/entailment.hpp"
#include "cpi/error.hpp"

namespace cpi {

std::vector<std::size_t> minimal_conflict(const std::vector<CpiAxiom>& axioms, const FeasibilityTest& feasible) {
  if (feasible(axioms)) throw NotInfeasibleError();
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < axioms.size(); ++i) kept.push_back(i);

  auto subset = [&](const std::vector<std::size_t>& idx) {
    std::vector<CpiAxiom> out;
    for (auto i : idx) out.push_back(axioms[i]);
    return out;
  };

  for (std::size_t pos = 0; pos < kept.size();) {
    auto trial = kept;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(pos));
    if (!feasible(subset(trial))) {
      kept = std::move(trial);
    } else {
      ++pos;
    }
  }
  return kept;
}

std::vector<std::size_t> diagnose_inconsistency(const KnowledgeBase& kb, const WorldSpace& ws) {
  if (kb.assumptions.empty()) {
    return minimal_conflict(kb.axioms, [&](const std::vector<CpiAxiom>& axioms) {
      return LinearEntailment(ws, linearize(axioms, ws)).feasible();
    });
  }
  return minimal_conflict(kb.axioms, [&](const std::vector<CpiAxiom>& axioms) {
    KnowledgeBase trial = kb;
    trial.axioms = axioms;
    return augmented_feasible(trial, ws);
  });
}

}  // namespace cpi
