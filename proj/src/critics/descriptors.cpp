#include "molspo/critics/descriptors.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "molspo/chem/smarts.hpp"
#include "molspo/common/embedded.hpp"
#include "molspo/critics/errors.hpp"

namespace molspo::critics {

using chem::Molecule;
using chem::SmartsPattern;
using chem::SmartsTarget;

namespace {

struct AtomType {
  std::string id;
  SmartsPattern pattern;
  double logp;
};

std::vector<std::string> data_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') {
      lines.push_back(line);
    }
  }
  return lines;
}

const std::vector<AtomType>& crippen_types() {
  static const std::vector<AtomType> types = [] {
    std::vector<AtomType> out;
    for (const std::string& line : data_lines(embedded_file("crippen.tsv"))) {
      std::istringstream fields(line);
      std::string id, smarts, value;
      std::getline(fields, id, '\t');
      std::getline(fields, smarts, '\t');
      std::getline(fields, value, '\t');
      out.push_back({id, SmartsPattern(smarts), std::stod(value)});
    }
    return out;
  }();
  return types;
}

const std::vector<SmartsPattern>& alert_patterns() {
  static const std::vector<SmartsPattern> patterns = [] {
    std::vector<SmartsPattern> out;
    for (const std::string& line : data_lines(embedded_file("qed_alerts.smarts"))) {
      out.emplace_back(line.substr(0, line.find('\t')));
    }
    return out;
  }();
  return patterns;
}

std::vector<SmartsPattern> compile(std::initializer_list<std::string_view> texts) {
  std::vector<SmartsPattern> out;
  for (const auto t : texts) {
    out.emplace_back(t);
  }
  return out;
}

const std::vector<SmartsPattern>& acceptor_patterns() {
  static const auto patterns = compile({
      "[oH0;X2]", "[OH1;X2;v2]", "[OH0;X2;v2]", "[OH0;X1;v2]", "[O-;X1]",
      "[SH0;X2;v2]", "[SH0;X1;v2]", "[S-;X1]", "[nH0;X2]", "[NH0;X1;v3]",
      "[$([N;+0;X3;v3]);!$(N[C,S]=O)]",
  });
  return patterns;
}

const SmartsPattern& donor_pattern() {
  static const SmartsPattern pattern(
      "[N&!H0&v3,N&!H0&+1&v4,O&H1&+0,S&H1&+0,n&H1&+0]");
  return pattern;
}

const SmartsPattern& rotatable_pattern() {
  static const SmartsPattern pattern(
      "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)"
      "&!$(C([CH3])([CH3])[CH3])&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])"
      "&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])&!$([CD3](=[N+])-!@[#7!D1])"
      "&!$([#7!D1]-!@[CD3]=[N+])]-,:;!@"
      "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)"
      "&!$(C([CH3])([CH3])[CH3])]");
  return pattern;
}

int count_matches(const std::vector<SmartsPattern>& patterns,
                  const SmartsTarget& target) {
  int n = 0;
  for (const auto& p : patterns) {
    n += static_cast<int>(p.count(target));
  }
  return n;
}

}  // namespace

double molecular_weight(const Molecule& m) {
  const double h = chem::element(chem::elem::kH).mass;
  double mw = 0;
  for (const chem::Atom& a : m.atoms()) {
    mw += chem::element(a.element).mass + h * a.hydrogens;
  }
  return mw;
}

double crippen_logp(const Molecule& m) {
  const Molecule expanded = m.with_explicit_hydrogens();
  const SmartsTarget target(expanded);
  const auto& types = crippen_types();
  double logp = 0;
  for (int i = 0; i < expanded.atom_count(); ++i) {
    bool typed = false;
    for (const AtomType& t : types) {
      if (t.pattern.matches_at(target, i)) {
        logp += t.logp;
        typed = true;
        break;
      }
    }
    if (!typed) {
      throw CriticError(CriticErrorKind::kUntypedAtom,
                        std::string(chem::element(expanded.atom(i).element).symbol) +
                            " at atom " + std::to_string(i));
    }
  }
  return logp;
}

int hbond_acceptors(const Molecule& m) {
  return count_matches(acceptor_patterns(), SmartsTarget(m));
}

int hbond_donors(const Molecule& m) {
  return static_cast<int>(donor_pattern().count(SmartsTarget(m)));
}

double tpsa(const Molecule& m) {
  const chem::RingInfo rings(m);
  double total = 0;
  for (int i = 0; i < m.atom_count(); ++i) {
    const chem::Atom& a = m.atom(i);
    if (a.element != chem::elem::kN && a.element != chem::elem::kO) {
      continue;
    }
    int h = a.hydrogens;
    int nbrs = 0, single = 0, dbl = 0, triple = 0, arom = 0;
    for (const chem::Neighbor& nb : m.neighbors(i)) {
      if (m.atom(nb.atom).element == chem::elem::kH) {
        ++h;
        continue;
      }
      ++nbrs;
      switch (m.bond(nb.bond).order) {
      case chem::BondOrder::kSingle:
        ++single;
        break;
      case chem::BondOrder::kDouble:
        ++dbl;
        break;
      case chem::BondOrder::kTriple:
        ++triple;
        break;
      case chem::BondOrder::kAromatic:
        ++arom;
        break;
      }
    }
    const int q = a.charge;
    bool in3 = false;
    for (const chem::Ring& r : rings.rings) {
      in3 |= r.size() == 3 &&
             std::binary_search(r.atoms.begin(), r.atoms.end(), i);
    }
    double c = -1;
    if (a.element == chem::elem::kN) {
      if (nbrs == 1) {
        if (h == 0 && triple == 1 && q == 0) c = 23.79;
        else if (h == 1 && dbl == 1 && q == 0) c = 23.85;
        else if (h == 2 && single == 1 && q == 0) c = 26.02;
        else if (h == 2 && dbl == 1 && q == 1) c = 25.59;
        else if (h == 3 && single == 1 && q == 1) c = 27.64;
      } else if (nbrs == 2) {
        if (h == 0 && single == 1 && dbl == 1 && q == 0) c = 12.36;
        else if (h == 0 && triple == 1 && dbl == 1 && q == 0) c = 13.60;
        else if (h == 1 && single == 2 && q == 0) c = in3 ? 21.94 : 12.03;
        else if (h == 0 && triple == 1 && single == 1 && q == 1) c = 4.36;
        else if (h == 1 && dbl == 1 && single == 1 && q == 1) c = 13.97;
        else if (h == 2 && single == 2 && q == 1) c = 16.61;
        else if (h == 0 && arom == 2 && q == 0) c = 12.89;
        else if (h == 1 && arom == 2 && q == 0) c = 15.79;
        else if (h == 1 && arom == 2 && q == 1) c = 14.14;
      } else if (nbrs == 3) {
        if (h == 0 && single == 3 && q == 0) c = in3 ? 3.01 : 3.24;
        else if (h == 0 && single == 1 && dbl == 2 && q == 0) c = 11.68;
        else if (h == 0 && single == 2 && dbl == 1 && q == 1) c = 3.01;
        else if (h == 1 && single == 3 && q == 1) c = 4.44;
        else if (h == 0 && arom == 3 && q == 0) c = 4.41;
        else if (h == 0 && single == 1 && arom == 2 && q == 0) c = 4.93;
        else if (h == 0 && dbl == 1 && arom == 2 && q == 0) c = 8.39;
        else if (h == 0 && arom == 3 && q == 1) c = 4.10;
        else if (h == 0 && single == 1 && arom == 2 && q == 1) c = 3.88;
      } else if (nbrs == 4) {
        if (h == 0 && single == 4 && q == 1) c = 0.0;
      }
      if (c < 0) {
        c = std::max(0.0, 30.5 - nbrs * 8.2 + h * 1.5);
      }
    } else {
      if (nbrs == 1) {
        if (h == 0 && dbl == 1 && q == 0) c = 17.07;
        else if (h == 1 && single == 1 && q == 0) c = 20.23;
        else if (h == 0 && single == 1 && q == -1) c = 23.06;
      } else if (nbrs == 2) {
        if (h == 0 && single == 2 && q == 0) c = in3 ? 12.53 : 9.23;
        else if (h == 0 && arom == 2 && q == 0) c = 13.14;
      }
      if (c < 0) {
        c = std::max(0.0, 28.5 - nbrs * 8.6 + h * 1.5);
      }
    }
    total += c;
  }
  return total;
}

int rotatable_bonds(const Molecule& m) {
  return static_cast<int>(rotatable_pattern().count(SmartsTarget(m)));
}

int aromatic_rings(const Molecule& m) {
  const int n = m.atom_count();
  std::vector<bool> removed(n, false);
  for (int i = 0; i < n; ++i) {
    if (m.atom(i).aromatic || !m.atom_in_ring(i)) {
      continue;
    }
    for (const chem::Neighbor& nb : m.neighbors(i)) {
      const auto order = m.bond(nb.bond).order;
      removed[i] = removed[i] || ((order == chem::BondOrder::kSingle ||
                                   order == chem::BondOrder::kAromatic) &&
                                  !m.atom(nb.atom).aromatic);
    }
  }
  // Cyclomatic number of what is left: bonds - atoms + components.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) {
    parent[i] = i;
  }
  auto find = [&](int x) {
    while (parent[x] != x) {
      x = parent[x] = parent[parent[x]];
    }
    return x;
  };
  int atoms = 0;
  int bonds = 0;
  int components = 0;
  for (int i = 0; i < n; ++i) {
    atoms += !removed[i];
  }
  components = atoms;
  for (const chem::Bond& b : m.bonds()) {
    if (removed[b.begin] || removed[b.end]) {
      continue;
    }
    ++bonds;
    const int x = find(b.begin);
    const int y = find(b.end);
    if (x != y) {
      parent[x] = y;
      --components;
    }
  }
  return bonds - atoms + components;
}

int structural_alerts(const Molecule& m) {
  const SmartsTarget target(m);
  int n = 0;
  for (const auto& p : alert_patterns()) {
    n += p.matches(target);
  }
  return n;
}

QedProperties qed_properties(const Molecule& m) {
  QedProperties p;
  p.mw = molecular_weight(m);
  p.alogp = crippen_logp(m);
  p.hba = hbond_acceptors(m);
  p.hbd = hbond_donors(m);
  p.psa = tpsa(m);
  p.rotb = rotatable_bonds(m);
  p.arom = aromatic_rings(m);
  p.alerts = structural_alerts(m);
  return p;
}

namespace {

struct Desirability {
  double a, b, c, d, e, f, dmax;

  double operator()(double x) const {
    const double rise = 1 + std::exp(-(x - c + d / 2) / e);
    const double fall = 1 + std::exp(-(x - c - d / 2) / f);
    return (a + b / rise * (1 - 1 / fall)) / dmax;
  }
};

constexpr std::array<Desirability, 8> kDesirability{{
    {2.817065973, 392.5754953, 290.7489764, 2.419764353, 49.22325677,
     65.37051707, 104.9805561},
    {3.172690585, 137.8624751, 2.534937431, 4.581497897, 0.822739154,
     0.576295591, 131.3186604},
    {2.948620388, 160.4605972, 3.615294657, 4.435986202, 0.290141953,
     1.300669958, 148.7763046},
    {1.618662227, 1010.051101, 0.985094388, 0.000000001, 0.713820843,
     0.920922555, 258.1632616},
    {1.876861559, 125.2232657, 62.90773554, 87.83366614, 12.01999824,
     28.51324732, 104.5686167},
    {0.010000000, 272.4121427, 2.558379970, 1.565547684, 1.271567166,
     2.758063707, 105.4420403},
    {3.217788970, 957.7374108, 2.274627939, 0.000000001, 1.317690384,
     0.375760881, 312.3372610},
    {0.010000000, 1199.094025, -0.09002883, 0.000000001, 0.185904477,
     0.875193782, 417.7253140},
}};

constexpr std::array<double, 8> kWeights{0.66, 0.46, 0.05, 0.61,
                                         0.06, 0.65, 0.48, 0.95};

}  // namespace

double qed(const QedProperties& p) {
  const std::array<double, 8> x{p.mw,  p.alogp, p.hba,  p.hbd,
                                p.psa, p.rotb,  p.arom, p.alerts};
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += kWeights[i] * std::log(kDesirability[i](x[i]));
    den += kWeights[i];
  }
  return std::exp(num / den);
}

double qed(const Molecule& m) { return qed(qed_properties(m)); }

}  // namespace molspo::critics
