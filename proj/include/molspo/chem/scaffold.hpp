#pragma once

#include <string>

#include "molspo/chem/molecule.hpp"

namespace molspo::chem {

/// Ring systems plus the linkers joining them.
struct Scaffold {
  Molecule molecule;

  bool empty() const { return molecule.empty(); }
  /// Canonical SMILES, empty for acyclic inputs.
  std::string smiles() const;
};

/// Repeatedly strips non-ring atoms of degree at most one.
Scaffold murcko_scaffold(const Molecule& m);

}  // namespace molspo::chem
