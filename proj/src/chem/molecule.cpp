#include "molspo/chem/molecule.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace molspo::chem {

const char* to_string(GraphErrorKind kind) {
  switch (kind) {
  case GraphErrorKind::kBadBondEndpoint:
    return "BadBondEndpoint";
  case GraphErrorKind::kSelfBond:
    return "SelfBond";
  case GraphErrorKind::kDuplicateBond:
    return "DuplicateBond";
  case GraphErrorKind::kAromaticBondMismatch:
    return "AromaticBondMismatch";
  case GraphErrorKind::kNonRingAromatic:
    return "NonRingAromatic";
  case GraphErrorKind::kValenceViolation:
    return "ValenceViolation";
  }
  return "Unknown";
}

MoleculeError::MoleculeError(GraphErrorKind kind, int atom)
    : std::runtime_error(std::string(to_string(kind)) + " at atom " +
                         std::to_string(atom)),
      kind_(kind),
      atom_(atom) { }

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : Molecule(Unchecked{}, std::move(atoms), std::move(bonds)) {
  if (const auto violation = validate()) {
    throw MoleculeError(violation->kind, violation->atom);
  }
}

Molecule::Molecule(Unchecked, std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = atom_count();
  for (const Bond& b : bonds_) {
    if (b.begin < 0 || b.end < 0 || b.begin >= n || b.end >= n) {
      // Leave the graph empty; validate() reports the endpoint error.
      offsets_.assign(1, 0);
      return;
    }
  }
  build_adjacency();
  find_ring_bonds();
}

std::optional<GraphViolation> Molecule::check(std::span<const Atom> atoms,
                                              std::span<const Bond> bonds) {
  const Molecule m(Unchecked{}, {atoms.begin(), atoms.end()},
                   {bonds.begin(), bonds.end()});
  return m.validate();
}

std::optional<GraphViolation> Molecule::validate() const {
  const int n = atom_count();
  std::set<std::pair<int, int>> seen;
  for (const Bond& b : bonds_) {
    if (b.begin < 0 || b.end < 0 || b.begin >= n || b.end >= n) {
      return GraphViolation{GraphErrorKind::kBadBondEndpoint,
                            std::max(0, std::min(b.begin, n - 1))};
    }
    if (b.begin == b.end) {
      return GraphViolation{GraphErrorKind::kSelfBond, b.begin};
    }
    if (!seen.emplace(std::minmax(b.begin, b.end)).second) {
      return GraphViolation{GraphErrorKind::kDuplicateBond, b.begin};
    }
    if (b.order == BondOrder::kAromatic &&
        !(atoms_[b.begin].aromatic && atoms_[b.end].aromatic)) {
      return GraphViolation{GraphErrorKind::kAromaticBondMismatch, b.begin};
    }
  }
  for (int i = 0; i < n; ++i) {
    if (atoms_[i].aromatic && !ring_atom_[i]) {
      return GraphViolation{GraphErrorKind::kNonRingAromatic, i};
    }
    const auto limit = max_valence(atoms_[i].element, atoms_[i].charge);
    if (limit && valence(i) > *limit) {
      return GraphViolation{GraphErrorKind::kValenceViolation, i};
    }
  }
  return std::nullopt;
}

void Molecule::build_adjacency() {
  const int n = atom_count();
  std::vector<int> counts(n + 1, 0);
  for (const Bond& b : bonds_) {
    ++counts[b.begin + 1];
    ++counts[b.end + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  offsets_ = counts;
  neighbors_.assign(bonds_.size() * 2, Neighbor{0, 0});
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int i = 0; i < bond_count(); ++i) {
    const Bond& b = bonds_[i];
    neighbors_[fill[b.begin]++] = {b.end, i};
    neighbors_[fill[b.end]++] = {b.begin, i};
  }
}

// A bond lies on a ring iff it is not a bridge. Iterative Tarjan lowlink.
void Molecule::find_ring_bonds() {
  const int n = atom_count();
  ring_atom_.assign(n, false);
  ring_bond_.assign(bonds_.size(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    int next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) {
      continue;
    }
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto nbrs = neighbors(f.atom);
      if (f.next < static_cast<int>(nbrs.size())) {
        const Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond) {
          continue;
        }
        if (disc[nb.atom] < 0) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[done.atom]);
          if (low[done.atom] > disc[parent]) {
            ring_bond_[done.parent_bond] = false;
          }
        }
      }
    }
  }
  for (int i = 0; i < bond_count(); ++i) {
    if (ring_bond_[i]) {
      ring_atom_[bonds_[i].begin] = true;
      ring_atom_[bonds_[i].end] = true;
    }
  }
}

std::vector<bool> Molecule::ring_bond_flags(int atom_count,
                                           std::span<const Bond> bonds) {
  const Molecule m(Unchecked{}, std::vector<Atom>(atom_count),
                   {bonds.begin(), bonds.end()});
  return m.ring_bond_;
}

int Molecule::heavy_degree(int atom) const {
  int d = 0;
  for (const Neighbor& nb : neighbors(atom)) {
    d += atoms_[nb.atom].element != elem::kH;
  }
  return d;
}

int Molecule::total_hydrogens(int atom) const {
  return atoms_[atom].hydrogens + (degree(atom) - heavy_degree(atom));
}

int Molecule::bond_order_sum(int atom) const {
  int sum = 0;
  for (const Neighbor& nb : neighbors(atom)) {
    sum += bond_valence(bonds_[nb.bond].order);
  }
  return sum;
}

namespace {

int normal_valence(const Atom& a) {
  const auto defaults = default_valences(a.element);
  const int v0 = defaults.empty() ? element(a.element).max_valence : defaults[0];
  switch (element(a.element).charge_rule) {
  case ChargeRule::kBoronLike:
    return v0 - a.charge;
  case ChargeRule::kCarbonLike:
    return v0 - std::abs(a.charge);
  case ChargeRule::kDonorLike:
    return v0 + a.charge;
  default:
    return v0;
  }
}

}  // namespace

int Molecule::valence(int atom) const {
  const Atom& a = atoms_[atom];
  int v = bond_order_sum(atom) + a.hydrogens;
  if (a.aromatic) {
    bool has_aromatic_bond = false;
    for (const Neighbor& nb : neighbors(atom)) {
      has_aromatic_bond |= bonds_[nb.bond].order == BondOrder::kAromatic;
    }
    if (has_aromatic_bond && v < normal_valence(a)) {
      ++v;
    }
  }
  return v;
}

std::optional<int> Molecule::bond_between(int a, int b) const {
  for (const Neighbor& nb : neighbors(a)) {
    if (nb.atom == b) {
      return nb.bond;
    }
  }
  return std::nullopt;
}

int Molecule::heavy_atom_count() const {
  return static_cast<int>(std::count_if(
      atoms_.begin(), atoms_.end(),
      [](const Atom& a) { return a.element != elem::kH; }));
}

std::vector<int> Molecule::component_labels() const {
  std::vector<int> label(atoms_.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int root = 0; root < atom_count(); ++root) {
    if (label[root] >= 0) {
      continue;
    }
    label[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : neighbors(a)) {
        if (label[nb.atom] < 0) {
          label[nb.atom] = next;
          stack.push_back(nb.atom);
        }
      }
    }
    ++next;
  }
  return label;
}

int Molecule::component_count() const {
  const auto labels = component_labels();
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

Molecule Molecule::subgraph(const std::vector<bool>& keep) const {
  std::vector<int> remap(atoms_.size(), -1);
  std::vector<Atom> atoms;
  for (int i = 0; i < atom_count(); ++i) {
    if (keep[i]) {
      remap[i] = static_cast<int>(atoms.size());
      atoms.push_back(atoms_[i]);
    }
  }
  std::vector<Bond> bonds;
  for (const Bond& b : bonds_) {
    const bool kb = keep[b.begin];
    const bool ke = keep[b.end];
    if (kb && ke) {
      bonds.push_back({remap[b.begin], remap[b.end], b.order});
    } else if (kb != ke && b.order != BondOrder::kAromatic) {
      const int survivor = kb ? b.begin : b.end;
      atoms[remap[survivor]].hydrogens += bond_valence(b.order);
    }
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

Molecule Molecule::with_explicit_hydrogens() const {
  std::vector<Atom> atoms = atoms_;
  std::vector<Bond> bonds = bonds_;
  for (int i = 0; i < atom_count(); ++i) {
    for (int h = 0; h < atoms_[i].hydrogens; ++h) {
      bonds.push_back({i, static_cast<int>(atoms.size()), BondOrder::kSingle});
      atoms.push_back(Atom{elem::kH, 0, false, 0});
    }
    atoms[i].hydrogens = 0;
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

}  // namespace molspo::chem
