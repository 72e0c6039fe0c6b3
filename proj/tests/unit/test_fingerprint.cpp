#include <doctest.h>

#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "corpus_path.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/common/rng.hpp"
#include "molspo/fp/fingerprint.hpp"

using namespace molspo;
using chem::parse_smiles;

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out += static_cast<char>((v >> (8 * i)) & 0xff);
  }
}

// Independent enumeration: environment codes defined recursively per atom,
// bond neighbourhoods by breadth-first distance.
std::multiset<std::string> oracle_codes(const chem::Molecule& m, int radius) {
  std::function<std::string(int, int)> code = [&](int a, int r) -> std::string {
    std::string out;
    if (r == 0) {
      out += static_cast<char>(0);
      out += static_cast<char>(m.atom(a).element);
      out += static_cast<char>(m.atom(a).charge);
      out += static_cast<char>(m.degree(a));
      out += static_cast<char>(m.atom(a).aromatic);
      return out;
    }
    out += static_cast<char>(r);
    put_u64(out, fp::fnv1a64(code(a, r - 1)));
    std::vector<std::pair<int, std::uint64_t>> nbrs;
    for (const auto& nb : m.neighbors(a)) {
      nbrs.emplace_back(static_cast<int>(m.bond(nb.bond).order),
                        fp::fnv1a64(code(nb.atom, r - 1)));
    }
    std::sort(nbrs.begin(), nbrs.end());
    for (const auto& [o, h] : nbrs) {
      out += static_cast<char>(o);
      put_u64(out, h);
    }
    return out;
  };
  auto distances = [&](int a) {
    std::vector<int> d(m.atom_count(), -1);
    d[a] = 0;
    std::vector<int> q{a};
    for (std::size_t k = 0; k < q.size(); ++k) {
      for (const auto& nb : m.neighbors(q[k])) {
        if (d[nb.atom] < 0) {
          d[nb.atom] = d[q[k]] + 1;
          q.push_back(nb.atom);
        }
      }
    }
    return d;
  };
  // Bonds within r: at least one endpoint closer than r.
  auto bonds_within = [&](const std::vector<int>& d, int r) {
    std::set<int> s;
    for (int b = 0; b < m.bond_count(); ++b) {
      const int x = d[m.bond(b).begin];
      const int y = d[m.bond(b).end];
      if ((x >= 0 && x < r) || (y >= 0 && y < r)) {
        s.insert(b);
      }
    }
    return s;
  };
  std::multiset<std::string> out;
  std::set<std::set<int>> seen;
  for (int a = 0; a < m.atom_count(); ++a) {
    out.insert(code(a, 0));
  }
  for (int r = 1; r <= radius; ++r) {
    std::map<std::set<int>, std::string> best;  // bond set -> min-hash code
    for (int a = 0; a < m.atom_count(); ++a) {
      const auto d = distances(a);
      const auto now = bonds_within(d, r);
      if (now == bonds_within(d, r - 1) || seen.contains(now)) {
        continue;
      }
      const std::string c = code(a, r);
      auto it = best.find(now);
      if (it == best.end() || fp::fnv1a64(c) < fp::fnv1a64(it->second)) {
        best[now] = c;
      }
    }
    for (const auto& [bonds, c] : best) {
      seen.insert(bonds);
      out.insert(c);
    }
  }
  return out;
}

std::multiset<std::string> library_codes(const chem::Molecule& m, int radius) {
  std::multiset<std::string> out;
  for (const auto& env : fp::morgan_environments(m, radius)) {
    out.insert(env.code);
  }
  return out;
}

}  // namespace

TEST_CASE("fingerprint basics") {
  const auto a = fp::morgan_fingerprint(parse_smiles("CCO"));
  const auto b = fp::morgan_fingerprint(parse_smiles("OCC"));
  CHECK(a == b);
  CHECK(fp::morgan_fingerprint(parse_smiles("C")).popcount() == 1);
  CHECK(fp::morgan_fingerprint(parse_smiles("c1ccccc1")).popcount() == 3);
  CHECK_THROWS_AS(fp::morgan_fingerprint(chem::Molecule{}), fp::FpError);
  CHECK_THROWS_AS(fp::Fingerprint(100), fp::FpError);
}

TEST_CASE("tanimoto arithmetic") {
  fp::Fingerprint x(64), y(64);
  CHECK(fp::tanimoto(x, y) == 1.0);
  for (const int bit : {1, 2, 3}) {
    x.set(bit);
  }
  for (const int bit : {2, 3, 4}) {
    y.set(bit);
  }
  CHECK(fp::tanimoto(x, y) == doctest::Approx(0.5));
  CHECK(fp::tanimoto(x, x) == 1.0);
  fp::Fingerprint z(64);
  z.set(10);
  CHECK(fp::tanimoto(x, z) == 0.0);
  CHECK_THROWS_AS(fp::tanimoto(x, fp::Fingerprint(128)), fp::FpError);
}

TEST_CASE("hex round trip") {
  const auto f = fp::morgan_fingerprint(parse_smiles("CC(=O)Nc1ccc(O)cc1"));
  CHECK(f.to_hex().size() == 256);
  CHECK(fp::Fingerprint::from_hex(f.to_hex()) == f);
  CHECK_THROWS_AS(fp::Fingerprint::from_hex("zz"), fp::FpError);
}

TEST_CASE("environment codes match the independent enumeration") {
  for (const std::string& line : testing::corpus_lines(200)) {
    CAPTURE(line);
    const auto m = parse_smiles(line);
    CHECK(library_codes(m, 2) == oracle_codes(m, 2));
  }
  CHECK(library_codes(parse_smiles("c1ccccc1"), 3) ==
        oracle_codes(parse_smiles("c1ccccc1"), 3));
}

TEST_CASE("fingerprint is invariant under atom relabelling") {
  Rng rng(11);
  const auto lines = testing::corpus_lines(300);
  std::vector<fp::Fingerprint> fps;
  for (const std::string& line : lines) {
    const auto m = parse_smiles(line);
    std::vector<int> ranks(m.atom_count());
    std::iota(ranks.begin(), ranks.end(), 0);
    rng.shuffle(ranks.begin(), ranks.end());
    const auto relabelled = parse_smiles(chem::write_smiles(m, ranks));
    CHECK(fp::morgan_fingerprint(relabelled) == fp::morgan_fingerprint(m));
    fps.push_back(fp::morgan_fingerprint(m));
  }
  for (std::size_t i = 0; i + 1 < fps.size(); i += 7) {
    const double s = fp::tanimoto(fps[i], fps[i + 1]);
    CHECK(s == fp::tanimoto(fps[i + 1], fps[i]));
    CHECK((s == 1.0) == (fps[i] == fps[i + 1]));
  }
}
