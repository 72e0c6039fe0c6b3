#include "molspo/chem/scaffold.hpp"

#include <vector>

#include "molspo/chem/smiles.hpp"

namespace molspo::chem {

std::string Scaffold::smiles() const { return write_smiles(molecule); }

Scaffold murcko_scaffold(const Molecule& m) {
  const int n = m.atom_count();
  std::vector<bool> keep(n, true);
  std::vector<int> degree(n);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i) {
    degree[i] = m.degree(i);
    if (!m.atom_in_ring(i) && degree[i] <= 1) {
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const int a = queue.back();
    queue.pop_back();
    if (!keep[a]) {
      continue;
    }
    keep[a] = false;
    for (const Neighbor& nb : m.neighbors(a)) {
      if (keep[nb.atom] && --degree[nb.atom] <= 1 && !m.atom_in_ring(nb.atom)) {
        queue.push_back(nb.atom);
      }
    }
  }
  return Scaffold{m.subgraph(keep)};
}

}  // namespace molspo::chem
