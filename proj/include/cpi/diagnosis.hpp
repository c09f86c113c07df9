#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cpi/knowledge_base.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

/// Decides whether a subset of the axioms (with everything else held fixed) is satisfiable.
using FeasibilityTest = std::function<bool(const std::vector<CpiAxiom>&)>;

/// Deletion filter: returns 0-based indices of an infeasible subset of `axioms`
/// that becomes feasible when any single member is removed. Throws NotInfeasibleError.
std::vector<std::size_t> minimal_conflict(const std::vector<CpiAxiom>& axioms, const FeasibilityTest& feasible);

/// Minimal conflicting subset of the knowledge base's axioms. Assumptions, if any,
/// stay in every feasibility check.
std::vector<std::size_t> diagnose_inconsistency(const KnowledgeBase& kb, const WorldSpace& ws);

}  // namespace cpi
