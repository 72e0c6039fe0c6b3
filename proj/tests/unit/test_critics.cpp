#include <doctest.h>

#include <fstream>
#include <sstream>

#include "corpus_path.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/common/rng.hpp"
#include "molspo/critics/descriptors.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/critics/reward.hpp"
#include "molspo/critics/sa_score.hpp"

using namespace molspo;
using chem::parse_smiles;

namespace {

// Frozen reference-toolkit values (scripts/reference_values.py).
constexpr double kRefLogpEthanol = -0.0014;
constexpr double kRefLogpAlkanes[] = {1.0262, 1.4163, 1.8064, 2.1965,
                                      2.5866, 2.9767, 3.3668};
constexpr double kRefQedBenzene = 0.44263;
constexpr double kRefQedLarge = 0.14464;
constexpr const char* kLarge =
    "CC(C)Oc1ccc2c(c1)c1cc3c(cc1n2Cc1ccc(C(F)(F)F)cc1)C1(CCN(C(=O)c2ccc(Cl)"
    "cc2)CC1)c1ccc(OCc2ccc(N4CCOCC4)cc2)cc1-3";
constexpr const char* kFusedMacrocycle =
    "C1CC2CC3CC4CCCCCC4CC3CC2C1C1CCCCCCCCCCC1";

const critics::FragmentTable& corpus_table() {
  static const critics::FragmentTable table = [] {
    std::vector<chem::Molecule> mols;
    for (const auto& line : testing::corpus_lines()) {
      mols.push_back(parse_smiles(line));
    }
    return critics::FragmentTable::fit(mols);
  }();
  return table;
}

std::vector<std::vector<std::string>> reference_rows() {
  std::ifstream in(testing::data_path("../tests/data/reference_descriptors.csv"));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      f.push_back(cell);
    }
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST_CASE("crippen logp against reference values") {
  CHECK(critics::crippen_logp(parse_smiles("CCO")) ==
        doctest::Approx(kRefLogpEthanol).epsilon(0).scale(1).epsilon(1e-9));
  double previous = -1e9;
  for (int n = 2; n <= 8; ++n) {
    const double v = critics::crippen_logp(parse_smiles(std::string(n, 'C')));
    CHECK(v == doctest::Approx(kRefLogpAlkanes[n - 2]).epsilon(1e-9));
    CHECK(v > previous);
    previous = v;
  }
  const double a = critics::crippen_logp(parse_smiles("CCO"));
  const double b = critics::crippen_logp(parse_smiles("c1ccccc1N"));
  CHECK(critics::crippen_logp(parse_smiles("CCO.c1ccccc1N")) ==
        doctest::Approx(a + b));
}

TEST_CASE("untyped atoms are reported") {
  // Noble gases have no atom type.
  CHECK_THROWS_AS(critics::crippen_logp(parse_smiles("[Xe]")),
                  critics::CriticError);
}

TEST_CASE("descriptors agree with the reference toolkit") {
  const auto rows = reference_rows();
  REQUIRE(rows.size() == 300);
  for (const auto& f : rows) {
    CAPTURE(f[0]);
    const auto p = critics::qed_properties(parse_smiles(f[0]));
    CHECK(p.mw == doctest::Approx(std::stod(f[1])).epsilon(1e-5));
    CHECK(p.alogp == doctest::Approx(std::stod(f[2])).epsilon(1e-5));
    CHECK(p.hba == std::stod(f[3]));
    CHECK(p.hbd == std::stod(f[4]));
    CHECK(p.psa == doctest::Approx(std::stod(f[5])).epsilon(1e-5));
    CHECK(p.rotb == std::stod(f[6]));
    CHECK(p.arom == std::stod(f[7]));
  }
}

TEST_CASE("druglikeness") {
  const double benzene = critics::qed(parse_smiles("c1ccccc1"));
  const double large = critics::qed(parse_smiles(kLarge));
  CHECK(parse_smiles(kLarge).heavy_atom_count() >= 60);
  CHECK(benzene > large);
  CHECK(kRefQedBenzene > kRefQedLarge);
  CHECK(benzene == doctest::Approx(kRefQedBenzene).epsilon(1e-4));
  CHECK(critics::qed(parse_smiles("C1=CC=CC=C1C")) ==
        critics::qed(parse_smiles("CC1=CC=CC=C1")));
  for (const auto& line : testing::corpus_lines(300)) {
    const double q = critics::qed(parse_smiles(line));
    CHECK(q > 0.0);
    CHECK(q <= 1.0);
  }
  CHECK(critics::structural_alerts(parse_smiles("C[N+](=O)[O-]")) == 1);
  CHECK(critics::structural_alerts(parse_smiles("CCO")) == 0);
  CHECK(critics::structural_alerts(parse_smiles("C1OC1C=O")) == 2);
}

TEST_CASE("fragment table") {
  const auto single = critics::FragmentTable::fit(
      std::vector<chem::Molecule>{parse_smiles("CC(=O)Nc1ccccc1")});
  for (const auto& [hash, count] : single.counts()) {
    CHECK(count >= 1);
  }
  const auto& table = corpus_table();
  std::uint64_t sum = 0;
  for (const auto& [hash, count] : table.counts()) {
    sum += count;
  }
  CHECK(sum == table.total());
  std::vector<chem::Molecule> mols;
  for (const auto& line : testing::corpus_lines(200)) {
    mols.push_back(parse_smiles(line));
  }
  CHECK(critics::FragmentTable::fit(mols).serialize() ==
        critics::FragmentTable::fit(mols).serialize());
  const auto back = critics::FragmentTable::parse(table.serialize());
  CHECK(back.serialize() == table.serialize());
  CHECK_THROWS_AS(critics::FragmentTable::fit(std::vector<chem::Molecule>{}),
                  critics::CriticError);
  CHECK_THROWS_AS(critics::FragmentTable::parse("junk"), critics::CriticError);
}

TEST_CASE("sa score") {
  const auto& table = corpus_table();
  const double ethanol = critics::sa_score(parse_smiles("CCO"), table);
  const double fused = critics::sa_score(parse_smiles(kFusedMacrocycle), table);
  CHECK(ethanol < fused);
  CHECK_THROWS_AS(critics::sa_score(parse_smiles("CCO"), critics::FragmentTable{}),
                  critics::CriticError);
  for (const auto& line : testing::corpus_lines(300)) {
    const double s = critics::sa_score(parse_smiles(line), table);
    CHECK(s >= 1.0);
    CHECK(s <= 10.0);
  }
  // Same size and ring terms; only fragment rarity differs.
  const auto common_table = critics::FragmentTable::fit(
      std::vector<chem::Molecule>{parse_smiles("CCCCCC")});
  const auto common = critics::sa_terms(parse_smiles("CCCCCC"), common_table);
  const auto rare = critics::sa_terms(parse_smiles("NNNNNN"), common_table);
  CHECK(common.fragment_score > rare.fragment_score);
  CHECK(common.score < rare.score);
}

TEST_CASE("normalize") {
  const critics::CriticSpec up{"x", critics::Direction::kMaximize, -10, 10};
  const critics::CriticSpec down{"x", critics::Direction::kMinimize, -10, 10};
  CHECK(critics::normalize(-10, up) == 0.0);
  CHECK(critics::normalize(0, up) == 0.5);
  CHECK(critics::normalize(-8, down) == doctest::Approx(0.9));
  CHECK(critics::normalize(50, up) == 1.0);
  CHECK(critics::normalize(-50, down) == 1.0);
  CHECK_THROWS_AS((critics::CriticSpec{"bad", critics::Direction::kMaximize, 1, 1}.validate()),
                  critics::CriticError);
}

TEST_CASE("reward weights and composite algebra") {
  for (const double beta : {0.2, 0.4, 0.6, 0.8}) {
    const auto w = critics::RewardWeights::from_beta(beta);
    CHECK(w.lambda_c == doctest::Approx((1 - beta) / 4));
    CHECK(w.sums_to_one());
  }
  const auto w = critics::RewardWeights::from_beta(0.2);
  CHECK(critics::combine({1, 1, 1, 1}, 1.0, w) == doctest::Approx(1.0));
  CHECK(critics::original_reward({0.5, 0.5, 0.5, 0.5}) == 0.5);
  CHECK(critics::original_reward({1, 1, 1, 1}) == 1.0);
  CHECK(critics::original_reward({0.9, 0.6, 0.7, 0.6}) == doctest::Approx(0.7));
  // Raising one critic strictly raises the composite.
  CHECK(critics::combine({0.5, 0.6, 0.5, 0.5}, 0.3, w) >
        critics::combine({0.5, 0.5, 0.5, 0.5}, 0.3, w));
}

TEST_CASE("critic suite") {
  critics::CriticSpecs specs;
  specs[critics::Critic::kDocking] = {"docking", critics::Direction::kMinimize, -14, -6};
  critics::CriticSuite suite(specs, corpus_table(),
                             [](const chem::Molecule&, std::string_view s) {
                               return critics::mock_docking_score(s);
                             });
  const auto w = critics::RewardWeights::from_beta(0.4);
  const auto x = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  const auto self = suite.composite_reward(x, x, w);
  CHECK(self.tanimoto_raw == 1.0);
  CHECK(self.composite ==
        doctest::Approx(0.4 + w.lambda_c * (self.normalized[0] + self.normalized[1] +
                                            self.normalized[2] + self.normalized[3])));
  CHECK(suite.raw(parse_smiles("c1cc(O)ccc1NC(C)=O")) == suite.raw(x));
  CHECK(suite.cache_size() == 1);

  Rng rng(3);
  const auto lines = testing::corpus_lines();
  for (int i = 0; i < 200; ++i) {
    const auto a = parse_smiles(lines[rng.below(lines.size())]);
    const auto b = parse_smiles(lines[rng.below(lines.size())]);
    const auto r = suite.composite_reward(a, b, w);
    CHECK(r.composite >= 0.0);
    CHECK(r.composite <= 1.0);
    const double d = r.raw[0];
    CHECK(d > -14.0);
    CHECK(d <= -6.0);
  }
  CHECK(critics::mock_docking_score("CCO") == critics::mock_docking_score("CCO"));
}
