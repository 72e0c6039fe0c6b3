#pragma once

// Backtracking labelled-graph isomorphism, independent of the library's
// canonicalization.

#include <algorithm>
#include <vector>

#include "molspo/chem/molecule.hpp"

namespace molspo::testing {

inline bool same_atom(const chem::Molecule& a, int i, const chem::Molecule& b,
                      int j) {
  return a.atom(i) == b.atom(j) && a.degree(i) == b.degree(j);
}

inline bool isomorphic(const chem::Molecule& a, const chem::Molecule& b) {
  const int n = a.atom_count();
  if (n != b.atom_count() || a.bond_count() != b.bond_count()) {
    return false;
  }
  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);
  // Order atoms of `a` so each one after the first in its component has an
  // already-mapped neighbour; this prunes the search hard.
  std::vector<int> order;
  std::vector<bool> queued(n, false);
  for (int root = 0; root < n; ++root) {
    if (queued[root]) {
      continue;
    }
    queued[root] = true;
    order.push_back(root);
    for (std::size_t k = order.size() - 1; k < order.size(); ++k) {
      for (const auto& nb : a.neighbors(order[k])) {
        if (!queued[nb.atom]) {
          queued[nb.atom] = true;
          order.push_back(nb.atom);
        }
      }
    }
  }
  auto consistent = [&](int i, int j) {
    if (!same_atom(a, i, b, j)) {
      return false;
    }
    for (const auto& nb : a.neighbors(i)) {
      const int mapped = map[nb.atom];
      if (mapped < 0) {
        continue;
      }
      const auto bond = b.bond_between(j, mapped);
      if (!bond || b.bond(*bond).order != a.bond(nb.bond).order) {
        return false;
      }
    }
    return true;
  };
  auto search = [&](auto&& self, std::size_t k) -> bool {
    if (k == order.size()) {
      return true;
    }
    const int i = order[k];
    for (int j = 0; j < n; ++j) {
      if (used[j] || !consistent(i, j)) {
        continue;
      }
      map[i] = j;
      used[j] = true;
      if (self(self, k + 1)) {
        return true;
      }
      map[i] = -1;
      used[j] = false;
    }
    return false;
  };
  return search(search, 0);
}

}  // namespace molspo::testing
