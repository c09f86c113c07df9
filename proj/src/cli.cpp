#include "cpi/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cpi/augmented.hpp"
#include "cpi/dempster_shafer.hpp"
#include "cpi/diagnosis.hpp"
#include "cpi/error.hpp"
#include "cpi/maxent.hpp"
#include "cpi/oracle.hpp"
#include "cpi/propagation.hpp"
#include "cpi/report.hpp"

namespace cpi {

namespace {

struct Flags {
  std::string path;
  bool json = false;
  bool maxent = false;
  std::string propagate;
  bool judge = false;
  std::string tolerance;
  std::size_t node_cap = AugmentedOptions{}.node_cap;
  std::size_t atom_cap = kDefaultAtomCap;
  std::size_t jobs = 1;
  int places = 6;
  std::string ds_action;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_input(const Flags& f, std::istream& in) {
  std::ostringstream text;
  if (f.path == "-") {
    text << in.rdbuf();
    return text.str();
  }
  std::ifstream file(f.path);
  if (!file) throw UsageError("cannot open '" + f.path + "'");
  text << file.rdbuf();
  return text.str();
}

AugmentedOptions augmented_options(const Flags& f) {
  AugmentedOptions o;
  o.node_cap = f.node_cap;
  if (!f.tolerance.empty()) o.tolerance = parse_rational(f.tolerance);
  if (o.tolerance <= 0) throw UsageError("--tolerance must be positive");
  return o;
}

MaxEntOptions maxent_options(const Flags& f) {
  MaxEntOptions o;
  if (!f.tolerance.empty()) o.tolerance = to_double(parse_rational(f.tolerance));
  if (!(o.tolerance > 0)) throw UsageError("--tolerance must be positive");
  return o;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

QueryReport report_of(const Query& q, const QueryResult& r, std::string method) {
  QueryReport out;
  out.query = q.to_string();
  out.status = r.status;
  out.interval = r.interval;
  out.lower_attained = r.lower_attained;
  out.upper_attained = r.upper_attained;
  out.method = std::move(method);
  out.stats = r.stats;
  return out;
}

void emit(const RunReport& report, const Flags& f, std::ostream& out) {
  RenderOptions ro{f.places};
  out << (f.json ? render_json(report, ro) : render_text(report, ro));
}

// Consistency of K (and D). Fills the diagnosis when inconsistent.
bool check_consistency(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, RunReport& report) {
  const bool ok = kb.assumptions.empty() ? feasible(kb, ws) : augmented_feasible(kb, ws, augmented_options(f));
  if (ok) return true;
  report.feasible = false;
  std::vector<std::size_t> d;
  for (auto i : diagnose_inconsistency(kb, ws)) d.push_back(i + 1);
  report.diagnosis = std::move(d);
  for (auto i : *report.diagnosis) report.notes.push_back("  axiom " + std::to_string(i) + ": " + kb.axioms[i - 1].to_string());
  return false;
}

std::vector<QueryResult> entailed_results(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f,
                                          std::vector<std::optional<Rational>>* gaps = nullptr) {
  std::vector<QueryResult> results(kb.queries.size());
  if (kb.assumptions.empty()) {
    auto all = entail_all(kb, ws, f.jobs);
    for (std::size_t i = 0; i < all.size(); ++i) results[i] = all[i].second;
    return results;
  }
  const AugmentedOptions options = augmented_options(f);
  std::vector<std::optional<Rational>> g(kb.queries.size());
  parallel_for(kb.queries.size(), f.jobs, [&](std::size_t i) {
    auto r = entail_augmented(kb, ws, kb.queries[i].target, kb.queries[i].given, options);
    results[i] = r.result;
    if (r.status == AugmentedStatus::OuterBound) g[i] = r.gap;
  });
  if (gaps) *gaps = std::move(g);
  return results;
}

// Propagated bound for P(target | given) derived from the unconditional table.
ProbabilityInterval propagated_bound(const BoundsTable& t, const Query& q) {
  if (q.given.is_true()) return t.at(q.target);
  const auto& joint = t.at(q.target && q.given);
  const auto& cond = t.at(q.given);
  if (cond.lower() == 0) return ProbabilityInterval::vacuous();
  Rational lo = joint.lower() / cond.upper();
  Rational hi = min(Rational(1), joint.upper() / cond.lower());
  return {min(lo, hi), hi};
}

std::vector<Sentence> query_sentences(const KnowledgeBase& kb) {
  std::vector<Sentence> s;
  for (const auto& q : kb.queries) {
    if (q.given.is_true()) {
      s.push_back(q.target);
    } else {
      s.push_back(q.target && q.given);
      s.push_back(q.given);
    }
  }
  return subformula_closure(s);
}

// Attaches propagated bounds (and verdicts against the entailed intervals when judging).
void attach_propagation(const KnowledgeBase& kb, const RunReport& entailed, const Flags& f, RunReport& report,
                        const std::string& rules_text) {
  const RuleSet rules = RuleSet::parse(rules_text);
  const auto result = propagate_fixpoint(kb, rules, query_sentences(kb));
  report.stats.sweeps += result.sweeps;
  std::map<Sentence, ProbabilityInterval> truth;
  for (std::size_t i = 0; i < kb.queries.size(); ++i) {
    auto& q = report.queries[i];
    q.propagated = propagated_bound(result.table, kb.queries[i]);
    q.stats.sweeps = result.sweeps;
    if (f.judge && entailed.queries[i].interval) {
      const auto& e = *entailed.queries[i].interval;
      Verdict v = Verdict::Unsound;
      if (q.propagated->contains(e)) v = *q.propagated == e ? Verdict::SoundAndComplete : Verdict::SoundIncomplete;
      q.verdict = to_string(v);
    }
  }
  if (!result.reached_fixpoint) report.notes.push_back("propagation stopped at the sweep cap before a fixpoint");
  if (f.judge) {
    Verdict overall = Verdict::SoundAndComplete;
    for (const auto& q : report.queries) {
      if (q.verdict == to_string(Verdict::Unsound)) overall = Verdict::Unsound;
      else if (q.verdict == to_string(Verdict::SoundIncomplete) && overall != Verdict::Unsound)
        overall = Verdict::SoundIncomplete;
    }
    report.notes.push_back("verdict: " + to_string(overall) + " (rules " + rules.to_string() + ")");
  }
}

RunReport entailed_report(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f) {
  RunReport report;
  std::vector<std::optional<Rational>> gaps;
  const auto results = entailed_results(kb, ws, f, &gaps);
  const std::string method = kb.assumptions.empty() ? "lp" : "branch-and-bound";
  for (std::size_t i = 0; i < results.size(); ++i) {
    report.queries.push_back(report_of(kb.queries[i], results[i], method));
    if (i < gaps.size()) report.queries.back().gap = gaps[i];
    report.stats += results[i].stats;
  }
  return report;
}

int cmd_entail(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, std::ostream& out) {
  RunReport report;
  if (!check_consistency(kb, ws, f, report)) {
    emit(report, f, out);
    return kExitInconsistent;
  }
  report = entailed_report(kb, ws, f);
  if (f.maxent) {
    const auto pr = precision_report(kb, ws, kb.queries, maxent_options(f));
    for (std::size_t i = 0; i < pr.entries.size(); ++i) {
      report.queries[i].maxent = pr.entries[i].maxent_value;
      report.queries[i].precision = to_string(pr.entries[i].classification);
    }
    if (!pr.solution.converged) report.notes.push_back("maxent did not reach the requested tolerance");
  }
  if (!f.propagate.empty()) attach_propagation(kb, report, f, report, f.propagate);
  emit(report, f, out);
  return kExitOk;
}

int cmd_propagate(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, std::ostream& out) {
  const std::string rules = f.propagate.empty() ? "sound" : f.propagate;
  RunReport entailed;
  if (f.judge) {
    if (!check_consistency(kb, ws, f, entailed)) {
      emit(entailed, f, out);
      return kExitInconsistent;
    }
    // Propagation reasons from K alone, so it is judged against the linear entailment.
    KnowledgeBase linear = kb;
    linear.assumptions.clear();
    entailed = entailed_report(linear, ws, f);
  }
  RunReport report;
  for (const auto& q : kb.queries) {
    QueryReport r;
    r.query = q.to_string();
    r.method = "propagation";
    report.queries.push_back(std::move(r));
  }
  attach_propagation(kb, entailed, f, report, rules);
  for (auto& q : report.queries) {
    q.interval = q.propagated;
    q.propagated.reset();
  }
  emit(report, f, out);
  return kExitOk;
}

int cmd_maxent(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, std::ostream& out) {
  RunReport report;
  if (!check_consistency(kb, ws, f, report)) {
    emit(report, f, out);
    return kExitInconsistent;
  }
  if (!kb.assumptions.empty()) report.notes.push_back("maxent ignores the assumption constraints");
  const auto pr = precision_report(kb, ws, kb.queries, maxent_options(f));
  for (const auto& e : pr.entries) {
    auto q = report_of(e.query, e.entailed, "maxent");
    q.maxent = e.maxent_value;
    q.precision = to_string(e.classification);
    report.stats += e.entailed.stats;
    report.queries.push_back(std::move(q));
  }
  const auto& s = pr.solution;
  std::ostringstream line;
  line.precision(10);
  line << "entropy " << s.entropy << ", kkt residual " << s.kkt_residual << ", " << s.iterations << " iterations"
       << (s.converged ? "" : " (not converged)");
  report.notes.push_back(line.str());
  if (!f.json) {
    emit(report, f, out);
    for (std::size_t w = 0; w < ws.size(); ++w) {
      std::ostringstream row;
      row.precision(10);
      row << "  world " << w << " {";
      for (std::size_t k = 0; k < ws.atoms().size(); ++k)
        row << (k ? ", " : "") << ws.atoms()[k] << "=" << (ws.value(w, k) ? 1 : 0);
      row << "}: " << s.distribution[w];
      out << row.str() << "\n";
    }
    return kExitOk;
  }
  auto doc = to_json(report, {f.places});
  doc["distribution"] = s.distribution;
  doc["entropy"] = s.entropy;
  doc["kkt_residual"] = s.kkt_residual;
  doc["iterations"] = s.iterations;
  doc["converged"] = s.converged;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

nlohmann::ordered_json mass_json(const MassFunction& m) {
  auto arr = nlohmann::ordered_json::array();
  for (Subset s : m.focal_sets()) {
    nlohmann::ordered_json e;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m.frame().size(); ++i)
      if (s >> i & 1u) names.push_back(m.frame().elements()[i]);
    e["set"] = names;
    e["mass"] = to_json(m.mass(s));
    arr.push_back(std::move(e));
  }
  return arr;
}

void print_mass(const MassFunction& m, int places, std::ostream& out) {
  for (Subset s : m.focal_sets())
    out << "  m(" << m.frame().to_string(s) << ") = " << to_fraction_string(m.mass(s)) << " ("
        << to_decimal_string(m.mass(s), places) << ")\n";
}

int cmd_ds(const KnowledgeBase& kb, const Flags& f, std::ostream& out) {
  RunReport base;
  if (f.ds_action == "combine") {
    if (kb.masses.empty()) throw FrameMappingError("no mass declarations to combine");
    const Frame frame = frame_of(kb);
    std::vector<MassFunction> sources;
    for (const auto& d : kb.masses) sources.push_back(mass_of(d, frame));
    std::optional<EvidenceCombination> result;
    try {
      result = combine_evidence(sources);
    } catch (const TotalConflictError& e) {
      throw TotalConflictError(e.first(), e.second(), kb.masses[e.first()].source, kb.masses[e.second()].source);
    }
    const auto& combined = *result;
    if (f.json) {
      auto doc = to_json(base, {f.places});
      doc["frame"] = frame.elements();
      auto names = nlohmann::ordered_json::array();
      for (const auto& d : kb.masses) names.push_back(d.source);
      doc["sources"] = names;
      auto k = nlohmann::ordered_json::array();
      for (const auto& c : combined.conflicts) k.push_back(to_json(c));
      doc["conflicts"] = k;
      doc["mass"] = mass_json(combined.mass);
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    out << "combined " << kb.masses.size() << " source" << (kb.masses.size() == 1 ? "" : "s") << "\n";
    for (std::size_t i = 0; i < combined.conflicts.size(); ++i)
      out << "  kappa(" << kb.masses[i].source << " + " << kb.masses[i + 1].source
          << ") = " << to_fraction_string(combined.conflicts[i]) << "\n";
    print_mass(combined.mass, f.places, out);
    return kExitOk;
  }

  // envelope / representable work from the entailed lower probabilities.
  const WorldSpace ws = make_world_space(kb, f.atom_cap);
  if (!check_consistency(kb, ws, f, base)) {
    emit(base, f, out);
    return kExitInconsistent;
  }
  if (!kb.assumptions.empty()) base.notes.push_back("the envelope ignores the assumption constraints");
  const auto env = envelope_from_entailment(kb, ws, mapping_of(kb));
  const Frame& frame = env.frame();
  if (f.ds_action == "envelope") {
    if (f.json) {
      auto doc = to_json(base, {f.places});
      doc["frame"] = frame.elements();
      auto rows = nlohmann::ordered_json::array();
      for (Subset s = 1; s < frame.subset_count(); ++s) {
        nlohmann::ordered_json r;
        r["set"] = frame.to_string(s);
        r["lower"] = to_json(env.lower(s));
        r["upper"] = to_json(env.upper(s));
        rows.push_back(std::move(r));
      }
      doc["envelope"] = rows;
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    for (Subset s = 1; s < frame.subset_count(); ++s)
      out << "P(" << frame.to_string(s) << "): " << render_interval({env.lower(s), env.upper(s)}, f.places) << "\n";
    for (const auto& n : base.notes) out << n << "\n";
    return kExitOk;
  }

  // representable
  const auto m = mass_from_bel(env);
  if (f.json) {
    auto doc = to_json(base, {f.places});
    doc["frame"] = frame.elements();
    if (auto* ok = std::get_if<MassFunction>(&m)) {
      doc["representable"] = true;
      doc["mass"] = mass_json(*ok);
    } else {
      const auto& bad = std::get<NotRepresentable>(m);
      doc["representable"] = false;
      doc["witness"] = frame.to_string(bad.witness);
      doc["witness_mass"] = to_json(bad.mass);
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  if (auto* ok = std::get_if<MassFunction>(&m)) {
    out << "representable\n";
    print_mass(*ok, f.places, out);
  } else {
    const auto& bad = std::get<NotRepresentable>(m);
    out << "NOT representable: m(" << frame.to_string(bad.witness) << ") = " << to_fraction_string(bad.mass) << "\n";
  }
  for (const auto& n : base.notes) out << n << "\n";
  return kExitOk;
}

int cmd_check(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, std::ostream& out) {
  RunReport report;
  const bool ok = check_consistency(kb, ws, f, report);
  if (ok) report.notes.push_back("consistent: " + std::to_string(ws.size()) + " worlds, " +
                                 std::to_string(kb.axioms.size()) + " axioms");
  emit(report, f, out);
  return ok ? kExitOk : kExitInconsistent;
}

int cmd_oracle(const KnowledgeBase& kb, const WorldSpace& ws, const Flags& f, std::ostream& out) {
  RunReport report;
  for (const auto& q : kb.queries) {
    if (kb.assumptions.empty()) {
      auto r = report_of(q, oracle::vertex_bounds(kb, ws, q.target, q.given), "vertex");
      report.queries.push_back(std::move(r));
    }
    if (ws.size() <= oracle::GridSearchConfig{}.max_worlds) {
      auto g = oracle::grid_bounds(kb, ws, q.target, q.given);
      auto r = report_of(q, g.result, "grid");
      r.lower_attained = r.upper_attained = false;
      report.queries.push_back(std::move(r));
    }
  }
  if (report.queries.empty() && !kb.queries.empty()) report.notes.push_back("no oracle applies to this knowledge base");
  emit(report, f, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interval-valued probabilistic entailment over possible worlds", "cpi"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("kb", f.path, "knowledge-base file, or - for standard input")->required();
    sub->add_flag("--json", f.json, "machine-readable output");
    sub->add_option("--tolerance", f.tolerance, "solver tolerance as a rational or decimal");
    sub->add_option("--node-cap", f.node_cap, "branch-and-bound node budget per query")->check(CLI::PositiveNumber);
    sub->add_option("--atom-cap", f.atom_cap, "maximum number of atoms")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", f.jobs, "queries solved concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--precision", f.places, "decimal places in rendered values")->check(CLI::Range(0, 30));
  };
  auto* entail = app.add_subcommand("entail", "entailed interval for every query");
  common(entail);
  entail->add_flag("--maxent", f.maxent, "add the maximum-entropy point value and precision class");
  entail->add_option("--propagate", f.propagate, "also run local propagation with these rules");
  entail->add_flag("--judge", f.judge, "compare propagated bounds against the entailed ones");
  auto* propagate = app.add_subcommand("propagate", "local interval propagation");
  common(propagate);
  propagate->add_option("--rules,--propagate", f.propagate, "rule list, e.g. sound or negation,frechet");
  propagate->add_flag("--judge", f.judge, "compare against the entailed intervals");
  auto* maxent = app.add_subcommand("maxent", "maximum-entropy distribution");
  common(maxent);
  auto* ds = app.add_subcommand("ds", "Dempster-Shafer operations");
  ds->add_option("action", f.ds_action, "combine, envelope or representable")
      ->required()
      ->check(CLI::IsMember({"combine", "envelope", "representable"}));
  common(ds);
  auto* check = app.add_subcommand("check", "consistency check with diagnosis");
  common(check);
  auto* oracle_cmd = app.add_subcommand("oracle", "");  // hidden: empty description
  common(oracle_cmd);
  oracle_cmd->group("");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (f.propagate.empty() && f.judge && entail->parsed()) f.propagate = "sound";
    if (!f.propagate.empty()) RuleSet::parse(f.propagate).validate();
    const KnowledgeBase kb = parse_kb(read_input(f, in));
    if (ds->parsed()) return cmd_ds(kb, f, out);
    const WorldSpace ws = make_world_space(kb, f.atom_cap);
    if (entail->parsed()) return cmd_entail(kb, ws, f, out);
    if (propagate->parsed()) return cmd_propagate(kb, ws, f, out);
    if (maxent->parsed()) return cmd_maxent(kb, ws, f, out);
    if (check->parsed()) return cmd_check(kb, ws, f, out);
    return cmd_oracle(kb, ws, f, out);
  } catch (const TotalConflictError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTotalConflict;
  } catch (const EmptyWorldSpaceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const InconsistencySignal& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace cpi
