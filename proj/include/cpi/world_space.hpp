#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpi/sentence.hpp"

namespace cpi {

inline constexpr std::size_t kDefaultAtomCap = 20;

/// Sorted world indices.
using WorldSet = std::vector<std::size_t>;

/// The consistent truth assignments over a fixed atom list, in lexicographic
/// order of the atom-ordered boolean vector (false < true).
class WorldSpace {
 public:
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::vector<Sentence>& background() const { return background_; }
  std::size_t size() const { return assignments_.size(); }

  std::optional<std::size_t> atom_index(std::string_view name) const;
  bool value(std::size_t world, std::size_t atom) const {
    return (assignments_[world] >> (atoms_.size() - 1 - atom)) & 1U;
  }
  World world(std::size_t index) const;
  /// All indices, 0..size()-1.
  WorldSet all() const;

  /// Throws UnknownAtomError if `s` mentions an atom outside this space.
  void check_atoms(const Sentence& s) const;

 private:
  friend WorldSpace build_world_space(std::vector<std::string> atoms, std::vector<Sentence> background,
                                      std::size_t atom_cap);
  friend WorldSet extension(const Sentence& s, const WorldSpace& ws);

  std::vector<std::string> atoms_;
  std::vector<Sentence> background_;
  // Bit (n-1-k) holds atom k, so ascending integers give the canonical order.
  std::vector<std::uint64_t> assignments_;
};

/// Enumerates all 2^|atoms| assignments and keeps those satisfying every
/// background sentence. Throws EmptyWorldSpaceError, SizeLimitError, UnknownAtomError.
WorldSpace build_world_space(std::vector<std::string> atoms, std::vector<Sentence> background = {},
                             std::size_t atom_cap = kDefaultAtomCap);

/// Indices of the worlds where `s` holds.
WorldSet extension(const Sentence& s, const WorldSpace& ws);

}  // namespace cpi
