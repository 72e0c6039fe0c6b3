#pragma once

#include <vector>

#include "molspo/chem/molecule.hpp"

namespace molspo::chem {

struct Ring {
  std::vector<int> atoms;  // sorted
  std::vector<int> bonds;  // sorted
  int size() const { return static_cast<int>(atoms.size()); }
};

/// Smallest set of smallest rings. The count equals the cyclomatic number
/// (bonds - atoms + components).
std::vector<Ring> sssr(const Molecule& m);

/// Per-atom and per-bond ring statistics derived from an SSSR.
struct RingInfo {
  std::vector<Ring> rings;
  std::vector<int> atom_ring_count;
  std::vector<int> atom_smallest_ring;  // 0 when not in a ring
  std::vector<int> atom_ring_bonds;     // ring bonds incident to the atom

  explicit RingInfo(const Molecule& m);
};

/// Atoms shared by exactly one atom (and no bond) between two rings.
int spiro_atom_count(const std::vector<Ring>& rings);

/// Atoms at the ends of a path of two or more bonds shared by two rings.
int bridgehead_atom_count(const Molecule& m, const std::vector<Ring>& rings);

}  // namespace molspo::chem
