#include <doctest.h>

#include <numeric>

#include "corpus_path.hpp"
#include "isomorphism.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/common/rng.hpp"

using namespace molspo::chem;
using molspo::testing::isomorphic;

namespace {

SmilesErrorKind error_kind(std::string_view text) {
  try {
    parse_smiles(text);
  } catch (const SmilesError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for " << text);
  return SmilesErrorKind::kSyntax;
}

std::size_t error_offset(std::string_view text) {
  try {
    parse_smiles(text);
  } catch (const SmilesError& e) {
    return e.offset();
  }
  return SIZE_MAX;
}

}  // namespace

TEST_CASE("parse simple molecules") {
  const Molecule methane = parse_smiles("C");
  CHECK(methane.atom_count() == 1);
  CHECK(methane.atom(0).hydrogens == 4);

  const Molecule benzene = parse_smiles("c1ccccc1");
  CHECK(benzene.atom_count() == 6);
  CHECK(benzene.bond_count() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(benzene.atom(i).aromatic);
    CHECK(benzene.atom(i).hydrogens == 1);
    CHECK(benzene.atom_in_ring(i));
  }

  const Molecule pyrrole = parse_smiles("c1cc[nH]c1");
  CHECK(pyrrole.atom(3).hydrogens == 1);
  CHECK(pyrrole.atom(3).element == elem::kN);

  const Molecule nitro = parse_smiles("C[N+](=O)[O-]");
  CHECK(nitro.atom(1).charge == 1);
  CHECK(nitro.atom(3).charge == -1);
  CHECK(nitro.atom(0).hydrogens == 3);

  CHECK(parse_smiles("ClCBr").atom(0).element == elem::kCl);
  CHECK(parse_smiles("OS(=O)(=O)O").atom(1).hydrogens == 0);
  CHECK(parse_smiles("CP(C)(C)=O").atom(1).hydrogens == 0);
}

TEST_CASE("stereo and isotopes are discarded") {
  CHECK(canonical_smiles("F/C=C/F") == canonical_smiles("FC=CF"));
  CHECK(canonical_smiles("C[C@@H](N)O") == canonical_smiles("CC(N)O"));
  CHECK(canonical_smiles("[13CH4]") == canonical_smiles("C"));
}

TEST_CASE("biaryl link between aromatic atoms is single") {
  const Molecule biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
  const Molecule implicit = parse_smiles("c1ccccc1c1ccccc1");
  CHECK(isomorphic(biphenyl, implicit));
  const auto link = implicit.bond_between(5, 6);
  REQUIRE(link);
  CHECK(implicit.bond(*link).order == BondOrder::kSingle);
}

TEST_CASE("parse errors carry kind and offset") {
  CHECK(error_kind("") == SmilesErrorKind::kEmptyInput);
  CHECK(error_kind("C(") == SmilesErrorKind::kUnbalancedParenthesis);
  CHECK(error_offset("C(") == 1);
  CHECK(error_kind("C)") == SmilesErrorKind::kUnbalancedParenthesis);
  CHECK(error_kind("C1CC") == SmilesErrorKind::kUnclosedRingBond);
  CHECK(error_offset("C1CC") == 1);
  CHECK(error_kind("CXC") == SmilesErrorKind::kUnknownElement);
  CHECK(error_offset("CXC") == 1);
  CHECK(error_kind("C[Zz]") == SmilesErrorKind::kUnknownElement);
  CHECK(error_kind("C=") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("=C") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("C[C") == SmilesErrorKind::kSyntax);
  CHECK(error_kind("C11") == SmilesErrorKind::kBondConflict);
  CHECK(error_kind("C=1CC#1") == SmilesErrorKind::kBondConflict);
}

TEST_CASE("valence and aromaticity violations") {
  CHECK(error_kind("C(C)(C)(C)(C)C") == SmilesErrorKind::kValenceViolation);
  CHECK(error_kind("[CH5]") == SmilesErrorKind::kValenceViolation);
  CHECK(error_kind("O=O=O") == SmilesErrorKind::kValenceViolation);
  CHECK(error_kind("FF(F)") == SmilesErrorKind::kValenceViolation);
  CHECK(error_kind("cc") == SmilesErrorKind::kAromaticity);
  CHECK(error_kind("C:C") == SmilesErrorKind::kAromaticity);
  CHECK(is_valid("C[N+](C)(C)C"));
  CHECK_FALSE(is_valid("CN(C)(C)C"));
  CHECK(is_valid("C[S](=O)(=O)C"));
  CHECK(is_valid("[O-]C"));
  CHECK_FALSE(is_valid("C(C)(C)(C)(C)C"));
}

TEST_CASE("canonical form is independent of input order") {
  CHECK(canonical_smiles("OCC") == canonical_smiles("CCO"));
  CHECK(canonical_smiles("C1=CC=CC=C1") != canonical_smiles("c1ccccc1"));
  CHECK(canonical_smiles("c1ccccc1C") == canonical_smiles("Cc1ccccc1"));
  CHECK(canonical_smiles("C(C)(C)(C)C") == canonical_smiles("CC(C)(C)C"));
  CHECK(canonical_smiles("C.O") == canonical_smiles("O.C"));
  CHECK(canonical_smiles("c1ccccc1") == "c1ccccc1");
  CHECK(canonical_smiles("C") == "C");
}

TEST_CASE("ring numbers above nine use percent notation") {
  const Molecule m = parse_smiles("C%10CC%10");
  CHECK(m.bond_count() == 3);
  CHECK(is_valid("C%99CC%99"));
  CHECK_FALSE(is_valid("C%9CC"));
}

TEST_CASE("corpus round trip preserves the graph") {
  const auto lines = molspo::testing::corpus_lines();
  REQUIRE(lines.size() >= 1000);
  molspo::Rng rng(7);
  for (const std::string& line : lines) {
    CAPTURE(line);
    const Molecule m = parse_smiles(line);
    const std::string canon = write_smiles(m);
    const Molecule back = parse_smiles(canon);
    REQUIRE(isomorphic(m, back));
    CHECK(write_smiles(back) == canon);

    // Any ranking gives a valid SMILES for the same graph, and its canonical
    // form is the same string.
    std::vector<int> ranks(m.atom_count());
    std::iota(ranks.begin(), ranks.end(), 0);
    rng.shuffle(ranks.begin(), ranks.end());
    const std::string shuffled = write_smiles(m, ranks);
    const Molecule other = parse_smiles(shuffled);
    REQUIRE(isomorphic(m, other));
    CHECK(write_smiles(other) == canon);
  }
}
