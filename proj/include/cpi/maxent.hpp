#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpi/entailment.hpp"
#include "cpi/knowledge_base.hpp"
#include "cpi/world_space.hpp"

namespace cpi {

struct MaxEntOptions {
  double tolerance = 1e-8;
  std::size_t iteration_cap = 100000;
};

struct MaxEntSolution {
  std::vector<double> distribution;  // one entry per world, sums to 1
  double entropy = 0;                // natural log
  double kkt_residual = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::size_t> zero_worlds;  // worlds the axioms force to probability 0
};

/// Maximum-entropy distribution subject to the linearized axioms.
/// Throws InfeasibleError. Non-convergence is reported, not thrown.
MaxEntSolution solve_maxent(const KnowledgeBase& kb, const WorldSpace& ws, const MaxEntOptions& options = {});

enum class Precision { PinnedByK, PartiallyDetermined, FullyUnderdetermined };

std::string to_string(Precision p);

struct PrecisionEntry {
  Query query;
  QueryResult entailed;
  double maxent_value = 0;  // NaN when the maxent distribution gives the condition probability 0
  Precision classification = Precision::FullyUnderdetermined;
};

struct PrecisionReport {
  MaxEntSolution solution;
  std::vector<PrecisionEntry> entries;
};

/// Entailed interval next to the maxent point value for each query.
PrecisionReport precision_report(const KnowledgeBase& kb, const WorldSpace& ws, const std::vector<Query>& queries,
                                 const MaxEntOptions& options = {});

}  // namespace cpi
