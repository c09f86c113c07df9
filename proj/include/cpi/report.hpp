#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpi/entailment.hpp"

namespace cpi {

struct QueryReport {
  std::string query;
  QueryStatus status = QueryStatus::Determined;
  std::optional<ProbabilityInterval> interval;
  bool lower_attained = false;
  bool upper_attained = false;
  std::string method = "lp";
  SolveStats stats;
  std::optional<Rational> gap;  // set when branch-and-bound stopped at an outer bound

  // Optional extras.
  std::optional<double> maxent;
  std::string precision;
  std::optional<ProbabilityInterval> propagated;
  std::string verdict;
};

struct RunReport {
  std::vector<QueryReport> queries;
  bool feasible = true;
  std::optional<std::vector<std::size_t>> diagnosis;  // 1-based axiom numbers
  SolveStats stats;
  std::vector<std::string> notes;  // free-form lines printed after the queries
};

struct RenderOptions {
  int places = 6;
};

std::string render_text(const RunReport& report, const RenderOptions& options = {});
std::string render_json(const RunReport& report, const RenderOptions& options = {});
/// The document render_json prints; callers may append fields after the fixed ones.
nlohmann::ordered_json to_json(const RunReport& report, const RenderOptions& options = {});
nlohmann::ordered_json to_json(const Rational& value);

/// "[0.3, 0.5] (exact 3/10, 1/2)"
std::string render_interval(const ProbabilityInterval& interval, int places = 6);

}  // namespace cpi
