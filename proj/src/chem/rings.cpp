#include "molspo/chem/rings.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>

namespace molspo::chem {

namespace {

using BitRow = std::vector<std::uint64_t>;

BitRow bond_bits(const std::vector<int>& bonds, int bond_count) {
  BitRow row((bond_count + 63) / 64, 0);
  for (const int b : bonds) {
    row[b / 64] |= std::uint64_t{1} << (b % 64);
  }
  return row;
}

int lowest_bit(const BitRow& row) {
  for (std::size_t w = 0; w < row.size(); ++w) {
    if (row[w] != 0) {
      return static_cast<int>(w * 64) + __builtin_ctzll(row[w]);
    }
  }
  return -1;
}

// Incremental GF(2) elimination keyed by pivot bit.
class CycleBasis {
 public:
  bool try_add(BitRow row) {
    while (true) {
      const int pivot = lowest_bit(row);
      if (pivot < 0) {
        return false;
      }
      const auto it = rows_.find(pivot);
      if (it == rows_.end()) {
        rows_.emplace(pivot, std::move(row));
        return true;
      }
      for (std::size_t w = 0; w < row.size(); ++w) {
        row[w] ^= it->second[w];
      }
    }
  }

 private:
  std::map<int, BitRow> rows_;
};

}  // namespace

std::vector<Ring> sssr(const Molecule& m) {
  const int n = m.atom_count();
  int ring_bonds = 0;
  for (int b = 0; b < m.bond_count(); ++b) {
    ring_bonds += m.bond_in_ring(b);
  }
  const int target = m.bond_count() - n + m.component_count();
  if (target <= 0 || ring_bonds == 0) {
    return {};
  }

  // Horton candidates: for every root atom and ring bond (x, y), the cycle
  // formed by the BFS-tree paths root->x, root->y plus the bond, when the
  // two paths meet only at the root.
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> candidates;
  std::vector<int> parent_bond(n);
  std::vector<int> dist(n);
  for (int root = 0; root < n; ++root) {
    if (!m.atom_in_ring(root)) {
      continue;
    }
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent_bond.begin(), parent_bond.end(), -1);
    dist[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop_front();
      for (const Neighbor& nb : m.neighbors(a)) {
        if (!m.bond_in_ring(nb.bond) || dist[nb.atom] >= 0) {
          continue;
        }
        dist[nb.atom] = dist[a] + 1;
        parent_bond[nb.atom] = nb.bond;
        queue.push_back(nb.atom);
      }
    }
    auto path = [&](int a) {
      std::vector<int> atoms{a};
      std::vector<int> bonds;
      while (a != root) {
        const int b = parent_bond[a];
        bonds.push_back(b);
        a = m.bond(b).other(a);
        atoms.push_back(a);
      }
      return std::pair{atoms, bonds};
    };
    for (int b = 0; b < m.bond_count(); ++b) {
      if (!m.bond_in_ring(b)) {
        continue;
      }
      const int x = m.bond(b).begin;
      const int y = m.bond(b).end;
      if (dist[x] < 0 || dist[y] < 0 || parent_bond[x] == b ||
          parent_bond[y] == b) {
        continue;
      }
      auto [px_atoms, px_bonds] = path(x);
      auto [py_atoms, py_bonds] = path(y);
      std::sort(px_atoms.begin(), px_atoms.end());
      std::sort(py_atoms.begin(), py_atoms.end());
      std::vector<int> shared;
      std::set_intersection(px_atoms.begin(), px_atoms.end(), py_atoms.begin(),
                            py_atoms.end(), std::back_inserter(shared));
      if (shared.size() != 1) {
        continue;
      }
      std::vector<int> bonds = px_bonds;
      bonds.insert(bonds.end(), py_bonds.begin(), py_bonds.end());
      bonds.push_back(b);
      std::sort(bonds.begin(), bonds.end());
      if (seen.insert(bonds).second) {
        candidates.push_back(std::move(bonds));
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() != b.size() ? a.size() < b.size() : a < b;
                   });

  CycleBasis basis;
  std::vector<Ring> rings;
  for (const auto& bonds : candidates) {
    if (static_cast<int>(rings.size()) == target) {
      break;
    }
    if (!basis.try_add(bond_bits(bonds, m.bond_count()))) {
      continue;
    }
    Ring ring;
    ring.bonds = bonds;
    for (const int b : bonds) {
      ring.atoms.push_back(m.bond(b).begin);
      ring.atoms.push_back(m.bond(b).end);
    }
    std::sort(ring.atoms.begin(), ring.atoms.end());
    ring.atoms.erase(std::unique(ring.atoms.begin(), ring.atoms.end()),
                     ring.atoms.end());
    rings.push_back(std::move(ring));
  }
  return rings;
}

RingInfo::RingInfo(const Molecule& m)
    : rings(sssr(m)),
      atom_ring_count(m.atom_count(), 0),
      atom_smallest_ring(m.atom_count(), 0),
      atom_ring_bonds(m.atom_count(), 0) {
  for (const Ring& ring : rings) {
    for (const int a : ring.atoms) {
      ++atom_ring_count[a];
      int& smallest = atom_smallest_ring[a];
      smallest = smallest == 0 ? ring.size() : std::min(smallest, ring.size());
    }
  }
  for (int b = 0; b < m.bond_count(); ++b) {
    if (m.bond_in_ring(b)) {
      ++atom_ring_bonds[m.bond(b).begin];
      ++atom_ring_bonds[m.bond(b).end];
    }
  }
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

int spiro_atom_count(const std::vector<Ring>& rings) {
  std::set<int> spiro;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      const auto atoms = intersect(rings[i].atoms, rings[j].atoms);
      if (atoms.size() == 1) {
        spiro.insert(atoms[0]);
      }
    }
  }
  return static_cast<int>(spiro.size());
}

int bridgehead_atom_count(const Molecule& m, const std::vector<Ring>& rings) {
  std::set<int> heads;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      const auto bonds = intersect(rings[i].bonds, rings[j].bonds);
      if (bonds.size() < 2) {
        continue;
      }
      // Endpoints of the shared path: shared atoms touching one shared bond.
      std::map<int, int> touch;
      for (const int b : bonds) {
        ++touch[m.bond(b).begin];
        ++touch[m.bond(b).end];
      }
      for (const auto& [atom, count] : touch) {
        if (count == 1) {
          heads.insert(atom);
        }
      }
    }
  }
  return static_cast<int>(heads.size());
}

}  // namespace molspo::chem
