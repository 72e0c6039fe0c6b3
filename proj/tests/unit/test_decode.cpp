#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "molspo/decode/decode.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/tokenizer/bpe.hpp"

using namespace molspo;
using namespace molspo::decode;

namespace {

// Fixed-horizon model with per-prefix logits drawn once from a seed.
class TableModel final : public StepModel {
 public:
  TableModel(int vocab, std::uint64_t seed) : vocab_(vocab), seed_(seed) { }
  int vocab_size() const override { return vocab_; }
  int eos() const override { return -1; }
  lm::RowVector begin(std::span<const int> prompt) override {
    prefix_.assign(prompt.begin(), prompt.end());
    return logits();
  }
  lm::RowVector advance(int token) override {
    prefix_.push_back(token);
    return logits();
  }

 private:
  lm::RowVector logits() const {
    std::uint64_t h = seed_;
    for (const int t : prefix_) {
      h = derive_seed(h, static_cast<std::uint64_t>(t) + 1);
    }
    Rng rng(h);
    lm::RowVector out(vocab_);
    for (int i = 0; i < vocab_; ++i) {
      out(i) = rng.normal();
    }
    return out;
  }
  int vocab_;
  std::uint64_t seed_;
  std::vector<int> prefix_;
};

double table_reward(const std::vector<int>& seq) {
  double r = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    r += std::sin(1.7 * static_cast<double>(seq[i]) + 0.3 * static_cast<double>(i * i) + 0.1);
  }
  return r;
}

lm::ModelConfig small_policy() {
  lm::ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.dim = 16;
  c.context = 64;
  c.vocab = 20;
  c.init_scale = 0.5;
  return c;
}

}  // namespace

TEST_CASE("top-pk examples") {
  const std::vector<double> probs{0.5, 0.3, 0.15, 0.05};
  CHECK(top_pk_candidates(probs, 0.85, 3) == std::vector<int>{0, 1, 2});
  CHECK(top_pk_candidates(probs, 0.5, 3) == std::vector<int>{0});
  CHECK(top_pk_candidates(probs, 0.99, 1) == std::vector<int>{0});
  CHECK(top_pk_candidates(probs, 1.0, 10).size() == 4);
  const std::vector<double> tied{0.25, 0.25, 0.25, 0.25};
  CHECK(top_pk_candidates(tied, 0.5, 4) == std::vector<int>{0, 1});
  const std::vector<double> shuffled{0.1, 0.6, 0.3};
  CHECK(top_pk_candidates(shuffled, 0.8, 5) == std::vector<int>{1, 2});
}

TEST_CASE("top-pk contract on random distributions") {
  Rng rng(123);
  for (int trial = 0; trial < 500; ++trial) {
    const int v = 2 + static_cast<int>(rng.below(60));
    std::vector<double> probs(static_cast<std::size_t>(v));
    for (auto& x : probs) {
      x = std::pow(rng.uniform(), 4.0);
    }
    const double z = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (auto& x : probs) {
      x /= z;
    }
    const double p = 0.5 + 0.5 * rng.uniform();
    const int k = 1 + static_cast<int>(rng.below(25));
    const auto set = top_pk_candidates(probs, p, k);
    REQUIRE(!set.empty());
    REQUIRE(static_cast<int>(set.size()) <= k);
    double mass = 0;
    for (const int t : set) {
      mass += probs[static_cast<std::size_t>(t)];
    }
    CHECK((mass >= p || static_cast<int>(set.size()) == k));
    // every excluded token is no more likely than every included one
    for (int t = 0; t < v; ++t) {
      if (std::find(set.begin(), set.end(), t) == set.end()) {
        for (const int s : set) {
          CHECK(probs[static_cast<std::size_t>(s)] >= probs[static_cast<std::size_t>(t)]);
        }
      }
    }
  }
}

TEST_CASE("sampling contract") {
  const lm::PolicyModel model(small_policy(), 4);
  PolicyStepModel step(model);
  const std::vector<int> prompt{tokenizer::kBos, tokenizer::kSource, 7, 8, tokenizer::kTarget};

  DecodeParams greedy;
  greedy.k = 1;
  greedy.max_length = 12;
  Rng r1(1);
  const Generation g = sample_sequence(step, prompt, greedy, r1);
  // greedy reference from full forward passes
  std::vector<int> ctx = prompt;
  std::vector<int> expect;
  for (int i = 0; i < greedy.max_length; ++i) {
    lm::RowVector last = model.logits(ctx).bottomRows(1);
    for (int s = 0; s < tokenizer::kSpecialCount; ++s) {
      if (s != tokenizer::kEos) last(s) = -1e300;
    }
    Eigen::Index best;
    last.maxCoeff(&best);
    if (best == tokenizer::kEos) break;
    expect.push_back(static_cast<int>(best));
    ctx.push_back(static_cast<int>(best));
  }
  CHECK(g.tokens == expect);
  CHECK(g.complete == (expect.size() < 12));

  DecodeParams params;
  params.p = 0.9;
  params.k = 5;
  params.max_length = 20;
  int incomplete = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(derive_seed(9, static_cast<std::uint64_t>(i)));
    const Generation gen = sample_sequence(step, prompt, params, rng,
                                           [&](std::span<const int> cand, int chosen) {
                                             CHECK(std::find(cand.begin(), cand.end(), chosen) !=
                                                   cand.end());
                                             CHECK(cand.size() <= 5);
                                             CHECK(chosen != tokenizer::kPad);
                                           });
    Rng again(derive_seed(9, static_cast<std::uint64_t>(i)));
    CHECK(sample_sequence(step, prompt, params, again).tokens == gen.tokens);
    if (!gen.complete) {
      ++incomplete;
      CHECK(gen.tokens.size() == 20);
    }
  }
  MESSAGE(incomplete << " of 100 generations hit max length");
}

TEST_CASE("best of n") {
  const lm::PolicyModel model(small_policy(), 8);
  PolicyStepModel step(model);
  const std::vector<int> prompt{tokenizer::kBos, tokenizer::kSource, 9, tokenizer::kTarget};
  DecodeParams params;
  params.max_length = 10;
  const RewardFn reward = [](const Generation& g) -> std::optional<double> {
    if (g.tokens.empty()) return std::nullopt;
    return table_reward(g.tokens);
  };

  const BestOfN one = best_of_n(step, prompt, 1, reward, params, 77);
  Rng rng(derive_seed(77, 0));
  const Generation single = sample_sequence(step, prompt, params, rng);
  if (!single.tokens.empty()) {
    CHECK(one.best.tokens == single.tokens);
    CHECK(one.index == 0);
  }

  double prev = -1e300;
  for (const int n : {1, 2, 4, 6, 8, 16}) {
    const BestOfN b = best_of_n(step, prompt, n, reward, params, 77);
    if (!b.all_invalid()) {
      CHECK(b.reward >= prev);
      prev = b.reward;
    }
  }

  const RewardFn none = [](const Generation&) -> std::optional<double> { return std::nullopt; };
  const BestOfN bad = best_of_n(step, prompt, 4, none, params, 1);
  CHECK(bad.all_invalid());
  CHECK(bad.valid == 0);

  const RewardFn flat = [](const Generation&) -> std::optional<double> { return 1.0; };
  CHECK(best_of_n(step, prompt, 5, flat, params, 3).index == 0);
}

TEST_CASE("best of n finds the maximizer of an enumerable model") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TableModel toy(3, seed);
    DecodeParams params;
    params.p = 1.0;
    params.k = 3;
    params.max_length = 3;
    double best = -1e300;
    for (int a = 0; a < 27; ++a) {
      best = std::max(best, table_reward({a / 9, a / 3 % 3, a % 3}));
    }
    const RewardFn reward = [](const Generation& g) -> std::optional<double> {
      return table_reward(g.tokens);
    };
    const BestOfN b = best_of_n(toy, {}, 2000, reward, params, seed);
    CHECK(b.best.complete);
    CHECK(b.best.tokens.size() == 3);
    CHECK(b.reward == doctest::Approx(best).epsilon(1e-15));
  }
}
