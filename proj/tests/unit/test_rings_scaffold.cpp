#include <doctest.h>

#include "corpus_path.hpp"
#include "isomorphism.hpp"
#include "molspo/chem/rings.hpp"
#include "molspo/chem/scaffold.hpp"
#include "molspo/chem/smiles.hpp"

#include <fstream>
#include <sstream>

using namespace molspo::chem;

TEST_CASE("sssr sizes") {
  CHECK(sssr(parse_smiles("CCCC")).empty());
  const auto naph = sssr(parse_smiles("c1ccc2ccccc2c1"));
  REQUIRE(naph.size() == 2);
  CHECK(naph[0].size() == 6);
  CHECK(naph[1].size() == 6);
  const auto cubane = sssr(parse_smiles("C12C3C4C1C5C2C3C45"));
  REQUIRE(cubane.size() == 5);
  for (const Ring& r : cubane) {
    CHECK(r.size() == 4);
  }
  const auto norbornane = sssr(parse_smiles("C1CC2CCC1C2"));
  REQUIRE(norbornane.size() == 2);
  CHECK(norbornane[0].size() == 5);
  CHECK(norbornane[1].size() == 5);
}

TEST_CASE("spiro and bridgehead atoms") {
  const Molecule spiro = parse_smiles("C1CCC2(C1)CCCCC2");
  CHECK(spiro_atom_count(sssr(spiro)) == 1);
  CHECK(bridgehead_atom_count(spiro, sssr(spiro)) == 0);
  const Molecule norbornane = parse_smiles("C1CC2CCC1C2");
  CHECK(bridgehead_atom_count(norbornane, sssr(norbornane)) == 2);
  const Molecule decalin = parse_smiles("C1CCC2CCCCC2C1");
  CHECK(bridgehead_atom_count(decalin, sssr(decalin)) == 0);
  CHECK(spiro_atom_count(sssr(decalin)) == 0);
}

TEST_CASE("ring counts agree with the reference toolkit") {
  std::ifstream in(molspo::testing::data_path("../tests/data/reference_descriptors.csv"));
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      f.push_back(cell);
    }
    CAPTURE(f[0]);
    const Molecule m = parse_smiles(f[0]);
    const auto rings = sssr(m);
    CHECK(static_cast<int>(rings.size()) == std::stoi(f[8]));
    CHECK(spiro_atom_count(rings) == std::stoi(f[9]));
    CHECK(bridgehead_atom_count(m, rings) == std::stoi(f[10]));
    ++rows;
  }
  CHECK(rows == 300);
}

TEST_CASE("murcko scaffold") {
  const Scaffold s = murcko_scaffold(parse_smiles("CCc1ccccc1"));
  CHECK(molspo::testing::isomorphic(s.molecule, parse_smiles("c1ccccc1")));
  CHECK(s.smiles() == canonical_smiles("c1ccccc1"));
  CHECK(murcko_scaffold(parse_smiles("CCCC")).empty());
  CHECK(murcko_scaffold(parse_smiles("C")).empty());
  // Linker between two rings survives, side chains do not.
  CHECK(murcko_scaffold(parse_smiles("CCc1ccc(CCC2CCCC2)cc1O")).smiles() ==
        canonical_smiles("c1ccc(CCC2CCCC2)cc1"));
  CHECK(murcko_scaffold(parse_smiles("O=C1CCCCC1")).smiles() ==
        canonical_smiles("C1CCCCC1"));
}

TEST_CASE("scaffold is idempotent and never grows") {
  for (const std::string& line : molspo::testing::corpus_lines(300)) {
    CAPTURE(line);
    const Molecule m = parse_smiles(line);
    const Scaffold once = murcko_scaffold(m);
    const Scaffold twice = murcko_scaffold(once.molecule);
    CHECK(once.molecule.atom_count() <= m.atom_count());
    CHECK(twice.smiles() == once.smiles());
    // Every surviving atom is a ring atom or lies between ring atoms.
    for (int i = 0; i < once.molecule.atom_count(); ++i) {
      CHECK((once.molecule.atom_in_ring(i) || once.molecule.degree(i) >= 2));
    }
  }
}
