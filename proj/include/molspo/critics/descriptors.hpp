#pragma once

#include "molspo/chem/molecule.hpp"

namespace molspo::critics {

/// Average molecular weight including implicit hydrogens.
double molecular_weight(const chem::Molecule& m);

/// Wildman-Crippen logP: sum of per-atom contributions from the first
/// matching atom type. Throws CriticError(kUntypedAtom) on a table gap.
double crippen_logp(const chem::Molecule& m);

int hbond_acceptors(const chem::Molecule& m);
int hbond_donors(const chem::Molecule& m);

/// Topological polar surface area from nitrogen and oxygen contributions.
double tpsa(const chem::Molecule& m);

/// Strict count: excludes amide-like C-N bonds, bonds to triple-bonded
/// atoms and to CX3 / tert-butyl rotors.
int rotatable_bonds(const chem::Molecule& m);

/// Rings left after removing aliphatic ring atoms that carry a
/// non-aromatic neighbour.
int aromatic_rings(const chem::Molecule& m);

/// Number of shipped alert patterns present at least once.
int structural_alerts(const chem::Molecule& m);

struct QedProperties {
  double mw = 0;
  double alogp = 0;
  double hba = 0;
  double hbd = 0;
  double psa = 0;
  double rotb = 0;
  double arom = 0;
  double alerts = 0;
};

QedProperties qed_properties(const chem::Molecule& m);

/// Weighted geometric mean of the eight desirabilities, in (0, 1].
double qed(const QedProperties& p);
double qed(const chem::Molecule& m);

}  // namespace molspo::critics
