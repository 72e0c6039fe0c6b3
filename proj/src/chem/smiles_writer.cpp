#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "molspo/chem/smiles.hpp"

namespace molspo::chem {

namespace {

constexpr int kMaxLeaves = 128;

// Replaces arbitrary sortable keys with dense ids 0..k-1 in key order.
template <typename Key>
std::vector<int> densify(const std::vector<Key>& keys) {
  std::vector<int> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<int>(i);
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ids(keys.size(), 0);
  int next = -1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || keys[order[i - 1]] < keys[order[i]]) {
      ++next;
    }
    ids[order[i]] = next;
  }
  return ids;
}

int class_count(const std::vector<int>& classes) {
  return classes.empty()
             ? 0
             : *std::max_element(classes.begin(), classes.end()) + 1;
}

std::vector<int> initial_classes(const Molecule& m) {
  using Key = std::tuple<int, int, int, int, int, int>;
  std::vector<Key> keys;
  keys.reserve(m.atom_count());
  for (int i = 0; i < m.atom_count(); ++i) {
    const Atom& a = m.atom(i);
    keys.emplace_back(a.element, a.charge, m.heavy_degree(i), a.aromatic,
                      m.total_hydrogens(i), m.atom_in_ring(i));
  }
  return densify(keys);
}

void append_atom(std::string& out, const Molecule& m, int i) {
  const Atom& a = m.atom(i);
  const Element& e = element(a.element);
  std::string symbol(e.symbol);
  if (a.aromatic) {
    symbol[0] = static_cast<char>(std::tolower(symbol[0]));
  }
  const bool bare =
      in_organic_subset(a.element) && a.charge == 0 &&
      implicit_hydrogens(a.element, a.aromatic, m.bond_order_sum(i)) ==
          a.hydrogens;
  if (bare) {
    out += symbol;
    return;
  }
  out += '[';
  out += symbol;
  if (a.hydrogens > 0) {
    out += 'H';
    if (a.hydrogens > 1) {
      out += std::to_string(a.hydrogens);
    }
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) {
      out += std::to_string(std::abs(a.charge));
    }
  }
  out += ']';
}

void append_bond(std::string& out, const Molecule& m, int bond) {
  const Bond& b = m.bond(bond);
  const bool both_aromatic = m.atom(b.begin).aromatic && m.atom(b.end).aromatic;
  switch (b.order) {
  case BondOrder::kSingle:
    if (both_aromatic) {
      out += '-';
    }
    break;
  case BondOrder::kDouble:
    out += '=';
    break;
  case BondOrder::kTriple:
    out += '#';
    break;
  case BondOrder::kAromatic:
    if (!m.bond_in_ring(bond)) {
      out += ':';
    }
    break;
  }
}

void append_ring_number(std::string& out, int number) {
  if (number < 10) {
    out += static_cast<char>('0' + number);
  } else {
    out += '%';
    out += std::to_string(number);
  }
}

class Writer {
 public:
  Writer(const Molecule& m, const std::vector<int>& ranks)
      : m_(m), ranks_(ranks), order_(m.atom_count(), -1),
        parent_bond_(m.atom_count(), -1), ring_edge_(m.bond_count(), false),
        ring_digit_(m.bond_count(), -1) { }

  std::string run() {
    std::vector<int> roots(m_.atom_count());
    for (int i = 0; i < m_.atom_count(); ++i) {
      roots[i] = i;
    }
    std::sort(roots.begin(), roots.end(),
              [&](int a, int b) { return ranks_[a] < ranks_[b]; });
    std::string out;
    for (const int root : roots) {
      if (order_[root] >= 0) {
        continue;
      }
      if (!out.empty()) {
        out += '.';
      }
      classify(root);
      emit(root, out);
    }
    return out;
  }

 private:
  std::vector<Neighbor> sorted_neighbors(int atom) const {
    const auto span = m_.neighbors(atom);
    std::vector<Neighbor> nbrs(span.begin(), span.end());
    std::sort(nbrs.begin(), nbrs.end(), [&](Neighbor a, Neighbor b) {
      return ranks_[a.atom] < ranks_[b.atom];
    });
    return nbrs;
  }

  // Pass 1: depth-first visit order, tree edges vs ring closures.
  void classify(int root) {
    struct Frame {
      int atom;
      std::vector<Neighbor> nbrs;
      std::size_t next;
    };
    std::vector<Frame> stack;
    order_[root] = counter_++;
    stack.push_back({root, sorted_neighbors(root), 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == f.nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = f.nbrs[f.next++];
      if (nb.bond == parent_bond_[f.atom]) {
        continue;
      }
      if (order_[nb.atom] < 0) {
        order_[nb.atom] = counter_++;
        parent_bond_[nb.atom] = nb.bond;
        stack.push_back({nb.atom, sorted_neighbors(nb.atom), 0});
      } else {
        ring_edge_[nb.bond] = true;
      }
    }
  }

  int take_digit() {
    for (std::size_t d = 1; d < in_use_.size(); ++d) {
      if (!in_use_[d]) {
        in_use_[d] = true;
        return static_cast<int>(d);
      }
    }
    in_use_.push_back(true);
    return static_cast<int>(in_use_.size()) - 1;
  }

  // Pass 2: text emission, recursion replaced by an explicit stack of
  // pending output pieces.
  void emit(int root, std::string& out) {
    struct Task {
      int atom;          // atom to write, or -1 for a literal
      int via_bond;      // bond written before the atom
      const char* text;  // literal when atom < 0
    };
    std::vector<Task> tasks{{root, -1, nullptr}};
    while (!tasks.empty()) {
      const Task t = tasks.back();
      tasks.pop_back();
      if (t.atom < 0) {
        out += t.text;
        continue;
      }
      if (t.via_bond >= 0) {
        append_bond(out, m_, t.via_bond);
      }
      const int a = t.atom;
      append_atom(out, m_, a);
      std::vector<Neighbor> closings;
      std::vector<Neighbor> openings;
      std::vector<Neighbor> children;
      for (const Neighbor& nb : sorted_neighbors(a)) {
        if (ring_edge_[nb.bond]) {
          (order_[nb.atom] < order_[a] ? closings : openings).push_back(nb);
        } else if (parent_bond_[nb.atom] == nb.bond && nb.bond != parent_bond_[a]) {
          children.push_back(nb);
        }
      }
      std::sort(closings.begin(), closings.end(), [&](Neighbor x, Neighbor y) {
        return order_[x.atom] < order_[y.atom];
      });
      for (const Neighbor& nb : closings) {
        const int digit = ring_digit_[nb.bond];
        append_ring_number(out, digit);
        in_use_[digit] = false;
      }
      for (const Neighbor& nb : openings) {
        const int digit = take_digit();
        ring_digit_[nb.bond] = digit;
        append_bond(out, m_, nb.bond);
        append_ring_number(out, digit);
      }
      // Children are pushed in reverse so the lowest rank is written first;
      // the last child continues the chain without parentheses.
      for (std::size_t k = children.size(); k-- > 0;) {
        const bool last = k + 1 == children.size();
        if (!last) {
          tasks.push_back({-1, -1, ")"});
        }
        tasks.push_back({children[k].atom, children[k].bond, nullptr});
        if (!last) {
          tasks.push_back({-1, -1, "("});
        }
      }
    }
  }

  const Molecule& m_;
  const std::vector<int>& ranks_;
  std::vector<int> order_;
  std::vector<int> parent_bond_;
  std::vector<bool> ring_edge_;
  std::vector<int> ring_digit_;
  std::vector<bool> in_use_{true};  // slot 0 unused
  int counter_ = 0;
};

struct Search {
  const Molecule& m;
  int leaves = 0;
  std::optional<std::string> best;
  std::vector<int> best_ranks;

  void visit(const std::vector<int>& classes) {
    const int n = static_cast<int>(classes.size());
    if (class_count(classes) == n) {
      ++leaves;
      std::string text = write_smiles(m, classes);
      if (!best || text < *best) {
        best = std::move(text);
        best_ranks = classes;
      }
      return;
    }
    // First class with more than one member.
    std::vector<int> size(n, 0);
    for (const int c : classes) {
      ++size[c];
    }
    int target = 0;
    while (size[target] < 2) {
      ++target;
    }
    for (int v = 0; v < n; ++v) {
      if (classes[v] != target) {
        continue;
      }
      std::vector<std::pair<int, int>> keys(n);
      for (int i = 0; i < n; ++i) {
        keys[i] = {classes[i], classes[i] == target && i != v ? 1 : 0};
      }
      visit(refine_classes(m, densify(keys)));
      if (leaves >= kMaxLeaves) {
        return;
      }
    }
  }
};

}  // namespace

std::vector<int> refine_classes(const Molecule& m, std::vector<int> classes) {
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  int count = class_count(classes);
  while (true) {
    std::vector<Key> keys(classes.size());
    for (int i = 0; i < m.atom_count(); ++i) {
      keys[i].first = classes[i];
      for (const Neighbor& nb : m.neighbors(i)) {
        keys[i].second.emplace_back(classes[nb.atom],
                                    static_cast<int>(m.bond(nb.bond).order));
      }
      std::sort(keys[i].second.begin(), keys[i].second.end());
    }
    classes = densify(keys);
    const int next = class_count(classes);
    if (next == count) {
      return classes;
    }
    count = next;
  }
}

std::vector<int> canonical_ranks(const Molecule& m) {
  if (m.empty()) {
    return {};
  }
  Search search{m, 0, std::nullopt, {}};
  search.visit(refine_classes(m, initial_classes(m)));
  return search.best_ranks;
}

std::string write_smiles(const Molecule& m, const std::vector<int>& ranks) {
  return Writer(m, ranks).run();
}

std::string write_smiles(const Molecule& m) {
  if (m.empty()) {
    return {};
  }
  Search search{m, 0, std::nullopt, {}};
  search.visit(refine_classes(m, initial_classes(m)));
  return *search.best;
}

std::string canonical_smiles(std::string_view text) {
  return write_smiles(parse_smiles(text));
}

}  // namespace molspo::chem
