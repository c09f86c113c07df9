#include "cpi/world_space.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cpi/error.hpp"

namespace cpi {

namespace {

// Truth values of `s` over a list of packed assignments.
std::vector<char> truth_column(const Sentence& s, const std::vector<std::uint64_t>& assignments,
                               const std::vector<std::string>& atoms) {
  using K = Sentence::Kind;
  const std::size_t n = assignments.size();
  switch (s.kind()) {
    case K::True: return std::vector<char>(n, 1);
    case K::False: return std::vector<char>(n, 0);
    case K::Atom: {
      auto it = std::find(atoms.begin(), atoms.end(), s.name());
      if (it == atoms.end()) throw UnknownAtomError(s.name());
      const auto shift = atoms.size() - 1 - static_cast<std::size_t>(it - atoms.begin());
      std::vector<char> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<char>((assignments[i] >> shift) & 1U);
      return out;
    }
    case K::Not: {
      auto out = truth_column(s.children()[0], assignments, atoms);
      for (auto& v : out) v = !v;
      return out;
    }
    case K::And:
    case K::Or: {
      const bool is_and = s.kind() == K::And;
      std::vector<char> out(n, is_and ? 1 : 0);
      for (const auto& child : s.children()) {
        auto col = truth_column(child, assignments, atoms);
        for (std::size_t i = 0; i < n; ++i) out[i] = is_and ? (out[i] && col[i]) : (out[i] || col[i]);
      }
      return out;
    }
    case K::Implies:
    case K::Iff: {
      auto a = truth_column(s.children()[0], assignments, atoms);
      auto b = truth_column(s.children()[1], assignments, atoms);
      for (std::size_t i = 0; i < n; ++i) a[i] = s.kind() == K::Implies ? (!a[i] || b[i]) : (a[i] == b[i]);
      return a;
    }
  }
  return {};
}

}  // namespace

std::optional<std::size_t> WorldSpace::atom_index(std::string_view name) const {
  auto it = std::find(atoms_.begin(), atoms_.end(), name);
  if (it == atoms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - atoms_.begin());
}

World WorldSpace::world(std::size_t index) const {
  World w;
  for (std::size_t k = 0; k < atoms_.size(); ++k) w.emplace(atoms_[k], value(index, k));
  return w;
}

WorldSet WorldSpace::all() const {
  WorldSet out(size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

void WorldSpace::check_atoms(const Sentence& s) const {
  for (const auto& a : s.atoms())
    if (!atom_index(a)) throw UnknownAtomError(a);
}

WorldSpace build_world_space(std::vector<std::string> atoms, std::vector<Sentence> background, std::size_t atom_cap) {
  if (atoms.empty()) throw Error("world space needs at least one atom");
  if (atoms.size() > atom_cap)
    throw SizeLimitError(std::to_string(atoms.size()) + " atoms exceed the cap of " + std::to_string(atom_cap));
  if (atoms.size() > 40) throw SizeLimitError("more than 40 atoms cannot be enumerated");
  std::set<std::string> seen;
  for (const auto& a : atoms) {
    if (!is_identifier(a)) throw Error("invalid atom name '" + a + "'");
    if (!seen.insert(a).second) throw Error("duplicate atom '" + a + "'");
  }

  WorldSpace ws;
  ws.atoms_ = std::move(atoms);
  ws.background_ = std::move(background);
  for (const auto& b : ws.background_) ws.check_atoms(b);

  const std::uint64_t count = std::uint64_t{1} << ws.atoms_.size();
  std::vector<std::uint64_t> candidates(count);
  std::iota(candidates.begin(), candidates.end(), std::uint64_t{0});
  std::vector<char> keep(count, 1);
  for (const auto& b : ws.background_) {
    auto col = truth_column(b, candidates, ws.atoms_);
    for (std::uint64_t i = 0; i < count; ++i) keep[i] = keep[i] && col[i];
  }
  for (std::uint64_t i = 0; i < count; ++i)
    if (keep[i]) ws.assignments_.push_back(i);
  if (ws.assignments_.empty()) throw EmptyWorldSpaceError();
  return ws;
}

WorldSet extension(const Sentence& s, const WorldSpace& ws) {
  auto col = truth_column(s, ws.assignments_, ws.atoms_);
  WorldSet out;
  for (std::size_t i = 0; i < col.size(); ++i)
    if (col[i]) out.push_back(i);
  return out;
}

}  // namespace cpi
