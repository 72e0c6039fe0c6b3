#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>

#include "corpus_path.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/critics/reward.hpp"
#include "molspo/surrogate/surrogate.hpp"
#include "molspo/tokenizer/bpe.hpp"

using namespace molspo;
using namespace molspo::surrogate;

namespace {

const tokenizer::Vocabulary& vocab() {
  static const tokenizer::Vocabulary v = tokenizer::train_bpe(testing::corpus_lines(), 256);
  return v;
}

SurrogateConfig quick_config() {
  SurrogateConfig c;
  c.blocks = 2;
  c.heads = 2;
  c.dim = 32;
  c.hidden = 32;
  return c;
}

std::vector<corpus::ScoredMolecule> affine_rows(std::size_t n, std::uint64_t seed) {
  const AffineTarget target;
  Rng rng(seed);
  std::vector<corpus::ScoredMolecule> rows;
  for (const auto& s : testing::corpus_lines(n)) {
    rows.push_back({s, target.sample(chem::parse_smiles(s), rng)});
  }
  return rows;
}

}  // namespace

TEST_CASE("r squared") {
  const std::vector<double> y{1, 2, 3, 4};
  CHECK(r_squared(y, y) == doctest::Approx(1.0));
  const std::vector<double> mean{2.5, 2.5, 2.5, 2.5};
  CHECK(r_squared(y, mean) == doctest::Approx(0.0));
  const std::vector<double> flat{3, 3, 3, 3};
  CHECK(std::isnan(r_squared(flat, y)));
}

TEST_CASE("affine target") {
  const AffineTarget t;
  // benzene: 6 heavy atoms, one ring
  CHECK(t.exact(chem::parse_smiles("c1ccccc1")) == doctest::Approx(-4.0 - 0.9 - 0.5));
  CHECK(t.exact(chem::parse_smiles("CCO")) == doctest::Approx(-4.0 - 0.45));
}

TEST_CASE("surrogate errors and determinism") {
  std::vector<corpus::ScoredMolecule> few(50, {"CCO", -7.0});
  try {
    (void)train_surrogate(few, vocab(), quick_config(), {});
    FAIL("expected throw");
  } catch (const critics::CriticError& e) {
    CHECK(e.kind() == critics::CriticErrorKind::kInsufficientData);
  }
  const SurrogateModel model(vocab(), quick_config(), 1);
  CHECK(model.predict("CCO") == model.predict("CCO"));
  CHECK(model.predict("OCC") == model.predict("C(O)C"));
  CHECK_THROWS_AS((void)model.predict("C1CC"), critics::CriticError);
  CHECK_THROWS_AS((void)model.predict("[Xe]"), critics::CriticError);
}

TEST_CASE("constant target is learned exactly and r2 is undefined") {
  std::vector<corpus::ScoredMolecule> rows;
  for (const auto& s : testing::corpus_lines(120)) {
    rows.push_back({s, -8.25});
  }
  SurrogateTrainOptions opt;
  opt.epochs = 2;
  const TrainedSurrogate out = train_surrogate(rows, vocab(), quick_config(), opt);
  CHECK(std::isnan(out.report.final_r2));
  for (const auto& r : rows) {
    CHECK(std::abs(out.model.predict(r.smiles) - (-8.25)) < 0.05);
  }
}

TEST_CASE("surrogate learns the affine target and persists") {
  const auto rows = affine_rows(600, 3);
  SurrogateTrainOptions opt;
  opt.epochs = 12;
  opt.seed = 5;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainedSurrogate out = train_surrogate(rows, vocab(), quick_config(), opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("r2 " << out.report.final_r2 << " in " << secs << " s");
  CHECK(out.report.final_r2 > 0.5);
  CHECK(out.report.train_mse.back() < out.report.train_mse.front());

  const auto path = std::filesystem::temp_directory_path() / "molspo_surrogate.ckpt";
  out.model.save(path);
  const SurrogateModel back = SurrogateModel::load(path);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(back.predict(rows[i].smiles) == out.model.predict(rows[i].smiles));
  }
  std::filesystem::remove(path);
}
