#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molspo/chem/elements.hpp"

namespace molspo::chem {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Integer contribution of a bond to its atoms' valence; aromatic bonds
/// count as one (the extra pi electron is accounted for per atom).
constexpr int bond_valence(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  std::uint8_t element = elem::kC;
  std::int8_t charge = 0;
  bool aromatic = false;
  /// Hydrogens attached to this atom that are not graph vertices.
  std::uint8_t hydrogens = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

enum class GraphErrorKind : std::uint8_t {
  kBadBondEndpoint,
  kSelfBond,
  kDuplicateBond,
  kAromaticBondMismatch,
  kNonRingAromatic,
  kValenceViolation,
};

const char* to_string(GraphErrorKind kind);

struct GraphViolation {
  GraphErrorKind kind;
  int atom;  // offending atom (first endpoint for bond problems)
};

class MoleculeError : public std::runtime_error {
 public:
  MoleculeError(GraphErrorKind kind, int atom);
  GraphErrorKind kind() const { return kind_; }
  int atom() const { return atom_; }

 private:
  GraphErrorKind kind_;
  int atom_;
};

/// Immutable atom/bond graph. Construction validates every structural
/// invariant, so any Molecule instance is valid.
class Molecule {
 public:
  Molecule() = default;
  /// Throws MoleculeError on the first violated invariant.
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  /// Checks invariants without constructing; nullopt when valid.
  static std::optional<GraphViolation> check(std::span<const Atom> atoms,
                                             std::span<const Bond> bonds);

  bool empty() const { return atoms_.empty(); }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }

  std::span<const Neighbor> neighbors(int atom) const {
    return {neighbors_.data() + offsets_[atom],
            neighbors_.data() + offsets_[atom + 1]};
  }
  int degree(int atom) const { return offsets_[atom + 1] - offsets_[atom]; }
  int heavy_degree(int atom) const;
  /// Implicit plus graph-vertex hydrogens.
  int total_hydrogens(int atom) const;
  /// Sum of bond_valence() over incident bonds.
  int bond_order_sum(int atom) const;
  /// Bond orders plus attached hydrogens, with one extra unit for aromatic
  /// atoms that need it to reach their normal valence.
  int valence(int atom) const;

  bool atom_in_ring(int atom) const { return ring_atom_[atom]; }
  bool bond_in_ring(int bond) const { return ring_bond_[bond]; }
  std::optional<int> bond_between(int a, int b) const;

  int heavy_atom_count() const;
  int component_count() const;
  /// Component label per atom, labels dense from 0 in atom order.
  std::vector<int> component_labels() const;

  /// Copy keeping only atoms with keep[i]; hydrogens on surviving atoms are
  /// increased by the order of each removed non-aromatic bond.
  Molecule subgraph(const std::vector<bool>& keep) const;

  /// Ring flags for a tentative bond list (bond order is irrelevant to ring
  /// membership). Endpoints must be in range.
  static std::vector<bool> ring_bond_flags(int atom_count,
                                           std::span<const Bond> bonds);

  /// Copy where every implicit hydrogen becomes an explicit H vertex.
  Molecule with_explicit_hydrogens() const;

 private:
  struct Unchecked {};
  Molecule(Unchecked, std::vector<Atom> atoms, std::vector<Bond> bonds);
  std::optional<GraphViolation> validate() const;
  void build_adjacency();
  void find_ring_bonds();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> offsets_{0};
  std::vector<Neighbor> neighbors_;
  std::vector<bool> ring_atom_;
  std::vector<bool> ring_bond_;
};

}  // namespace molspo::chem
