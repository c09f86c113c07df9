#include "cpi/report.hpp"

#include <cmath>
#include <sstream>

namespace cpi {

namespace {

using Json = nlohmann::ordered_json;

Json integer(const mpz_class& z) {
  if (z.fits_slong_p()) return Json(static_cast<std::int64_t>(z.get_si()));
  return Json(z.get_str());
}

Json rational(const Rational& r) {
  Json j;
  j["num"] = integer(r.get_num());
  j["den"] = integer(r.get_den());
  return j;
}

Json stats_json(const SolveStats& s) {
  Json j;
  j["lp_solves"] = s.lp_solves;
  j["pivots"] = s.pivots;
  j["nodes"] = s.nodes;
  j["sweeps"] = s.sweeps;
  return j;
}

Json interval_json(const ProbabilityInterval& i) {
  Json j;
  j["lower"] = rational(i.lower());
  j["upper"] = rational(i.upper());
  return j;
}

}  // namespace

std::string render_interval(const ProbabilityInterval& interval, int places) {
  return "[" + to_decimal_string(interval.lower(), places) + ", " + to_decimal_string(interval.upper(), places) +
         "] (exact " + to_fraction_string(interval.lower()) + ", " + to_fraction_string(interval.upper()) + ")";
}

std::string render_text(const RunReport& report, const RenderOptions& options) {
  std::ostringstream out;
  if (!report.feasible) {
    out << "inconsistent knowledge base";
    if (report.diagnosis) {
      out << "; minimal conflicting axioms {";
      for (std::size_t i = 0; i < report.diagnosis->size(); ++i) out << (i ? ", " : "") << (*report.diagnosis)[i];
      out << "}";
    }
    out << "\n";
  }
  for (const auto& q : report.queries) {
    out << q.query << ": ";
    if (!q.interval) {
      out << to_string(q.status);
    } else {
      if (q.status != QueryStatus::Determined) out << to_string(q.status) << " ";
      out << render_interval(*q.interval, options.places);
    }
    if (q.method == "vertex" || q.method == "grid") out << "  " << q.method;
    if (q.method == "branch-and-bound") {
      out << "  branch-and-bound, " << q.stats.nodes << " nodes";
      if (q.gap) out << ", outer bound (gap " << to_decimal_string(*q.gap, options.places) << ")";
    }
    if (q.maxent) {
      out << "  maxent ";
      if (std::isnan(*q.maxent))
        out << "undefined";
      else
        out << to_decimal_string(Rational(*q.maxent), options.places);
      out << " (" << q.precision << ")";
    }
    if (q.propagated) out << "  propagated " << render_interval(*q.propagated, options.places);
    if (!q.verdict.empty()) out << "  " << q.verdict;
    out << "\n";
  }
  for (const auto& n : report.notes) out << n << "\n";
  return out.str();
}

Json to_json(const Rational& value) { return rational(value); }

std::string render_json(const RunReport& report, const RenderOptions& options) {
  return to_json(report, options).dump(2) + "\n";
}

Json to_json(const RunReport& report, const RenderOptions& options) {
  Json doc;
  Json queries = Json::array();
  for (const auto& q : report.queries) {
    Json j;
    j["query"] = q.query;
    j["lower"] = q.interval ? rational(q.interval->lower()) : Json(nullptr);
    j["upper"] = q.interval ? rational(q.interval->upper()) : Json(nullptr);
    j["status"] = to_string(q.status);
    j["method"] = q.method;
    j["decimal"] = q.interval ? Json::array({to_decimal_string(q.interval->lower(), options.places),
                                              to_decimal_string(q.interval->upper(), options.places)})
                              : Json(nullptr);
    j["lower_attained"] = q.lower_attained;
    j["upper_attained"] = q.upper_attained;
    j["stats"] = stats_json(q.stats);
    if (q.gap) j["gap"] = rational(*q.gap);
    if (q.maxent) {
      j["maxent"] = std::isnan(*q.maxent) ? Json(nullptr) : Json(*q.maxent);
      j["precision"] = q.precision;
    }
    if (q.propagated) j["propagated"] = interval_json(*q.propagated);
    if (!q.verdict.empty()) j["verdict"] = q.verdict;
    queries.push_back(std::move(j));
  }
  doc["queries"] = std::move(queries);
  doc["feasible"] = report.feasible;
  doc["diagnosis"] = report.diagnosis ? Json(*report.diagnosis) : Json(nullptr);
  doc["stats"] = stats_json(report.stats);
  if (!report.notes.empty()) doc["notes"] = report.notes;
  return doc;
}

}  // namespace cpi
