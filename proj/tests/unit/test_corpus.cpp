#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "corpus_path.hpp"
#include "molspo/chem/scaffold.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/corpus/corpus.hpp"
#include "molspo/fp/fingerprint.hpp"

using namespace molspo;
using namespace molspo::corpus;

namespace {

double direct_tanimoto(const std::string& a, const std::string& b) {
  return fp::tanimoto(fp::morgan_fingerprint(chem::parse_smiles(a)),
                      fp::morgan_fingerprint(chem::parse_smiles(b)));
}

std::string direct_scaffold(const std::string& s) {
  return chem::murcko_scaffold(chem::parse_smiles(s)).smiles();
}

}  // namespace

TEST_CASE("eligibility") {
  CHECK(pair_eligible("OCC", "CCO"));
  CHECK(pair_eligible("c1ccccc1O", "Oc1ccccc1"));

  CHECK(direct_tanimoto("CCCC", "c1ccccc1O") <= 0.5);
  CHECK(direct_scaffold("CCCC").empty());
  CHECK_FALSE(pair_eligible("CCCC", "c1ccccc1O"));

  // Same benzene scaffold, dissimilar decorations.
  const std::string a = "OC(=O)CCCCCCc1ccccc1";
  const std::string b = "FC(F)(F)N(Cl)c1ccccc1";
  CHECK(direct_tanimoto(a, b) <= 0.5);
  CHECK(direct_scaffold(a) == direct_scaffold(b));
  CHECK(pair_eligible(a, b));

  // Acyclic molecules never match through the scaffold branch.
  const std::string c = "CCCCCCCCCCO";
  const std::string d = "NC(=O)C(F)(F)F";
  CHECK(direct_tanimoto(c, d) <= 0.5);
  CHECK_FALSE(pair_eligible(c, d));

  CHECK_THROWS(pair_eligible("C1CC", "CC"));
}

TEST_CASE("pretrain corpus on the molecule set") {
  const auto molecules = testing::corpus_lines();
  const PairCorpus corpus = build_pretrain_corpus(molecules, 100, 7);
  REQUIRE_FALSE(corpus.budget_exhausted());
  CHECK(corpus.train.size() == 90);
  CHECK(corpus.valid.size() == 10);
  CHECK(corpus.attempts <= 100 * kAttemptsPerPair);

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto* split : {&corpus.train, &corpus.valid}) {
    for (const auto& p : *split) {
      CHECK(p.x != p.y);
      CHECK(seen.emplace(p.x, p.y).second);
      // post-hoc check with direct computation
      const double sim = direct_tanimoto(p.x, p.y);
      CHECK(sim == doctest::Approx(p.tanimoto).epsilon(1e-12));
      const auto sx = direct_scaffold(p.x);
      const bool same = !sx.empty() && sx == direct_scaffold(p.y);
      CHECK(same == p.same_scaffold);
      CHECK((sim > 0.5 || same));
    }
  }

  const PairCorpus again = build_pretrain_corpus(molecules, 100, 7);
  CHECK(again.train == corpus.train);
  CHECK(again.valid == corpus.valid);
  const PairCorpus other = build_pretrain_corpus(molecules, 100, 8);
  CHECK(other.train != corpus.train);
}

TEST_CASE("two molecules give at most both orderings") {
  const std::vector<std::string> two{"c1ccccc1C", "c1ccccc1CC"};
  const PairCorpus corpus = build_pretrain_corpus(two, 2, 1);
  CHECK(corpus.size() == 2);
  CHECK_FALSE(corpus.budget_exhausted());
  const PairCorpus greedy = build_pretrain_corpus(two, 3, 1);
  CHECK(greedy.size() == 2);
  CHECK(greedy.shortfall == 1);
  CHECK(greedy.attempts == 150);

  CHECK_THROWS_AS(build_pretrain_corpus(std::vector<std::string>{"CC"}, 1, 1),
                  CorpusError);
}

TEST_CASE("pair tsv round trip") {
  const auto molecules = testing::corpus_lines(400);
  const PairCorpus corpus = build_pretrain_corpus(molecules, 20, 3);
  std::stringstream io;
  write_pairs(io, corpus.train);
  CHECK(read_pairs(io) == corpus.train);

  std::stringstream bad("CC\tCCO\n");
  CHECK_THROWS_AS(read_pairs(bad), CorpusError);
}

TEST_CASE("finetune buffer") {
  const std::vector<ScoredMolecule> rows{{"CC", -5.0}, {"CCO", -7.0}, {"CCN", -15.0}};
  const FinetuneBuffer one = build_finetune_buffer(rows, 1, 0);
  REQUIRE(one.size() == 1);
  CHECK(one.molecules()[0].smiles == "CCO");
  try {
    (void)build_finetune_buffer(rows, 2, 0);
    FAIL("expected throw");
  } catch (const CorpusError& e) {
    CHECK(e.kind() == CorpusErrorKind::kInsufficientRows);
  }

  std::vector<ScoredMolecule> many;
  for (int i = 0; i < 200; ++i) {
    many.push_back({"C" + std::string(static_cast<std::size_t>(i % 7 + 1), 'C'),
                    -14.0 + 8.0 * i / 199.0});
  }
  const auto a = build_finetune_buffer(many, 50, 11);
  const auto b = build_finetune_buffer(many, 50, 11);
  CHECK(a.molecules() == b.molecules());
  for (const auto& m : a.molecules()) {
    CHECK(m.docking_score >= -14.0);
    CHECK(m.docking_score <= -6.0);
  }
  // without replacement: distinct source rows (scores are unique)
  std::set<double> scores;
  for (const auto& m : a.molecules()) {
    scores.insert(m.docking_score);
  }
  CHECK(scores.size() == 50);
}

TEST_CASE("scored csv") {
  std::stringstream in("smiles,docking_score\nCCO,-7.5\r\nc1ccccc1,-9\n");
  const auto rows = read_scored_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].smiles == "c1ccccc1");
  CHECK(rows[1].docking_score == -9.0);
  std::stringstream no_header("CCO,-7.5\n");
  CHECK_THROWS_AS(read_scored_csv(no_header), CorpusError);
  std::stringstream bad_num("smiles,docking_score\nCCO,abc\n");
  CHECK_THROWS_AS(read_scored_csv(bad_num), CorpusError);

  const auto path = std::filesystem::temp_directory_path() / "molspo_scored.csv";
  save_scored_csv(path, rows);
  CHECK(load_scored_csv(path) == rows);
  std::filesystem::remove(path);
}
