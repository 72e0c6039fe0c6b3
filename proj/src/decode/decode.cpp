#include "molspo/decode/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "molspo/tokenizer/bpe.hpp"

namespace molspo::decode {

void DecodeParams::validate() const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DecodeError("p must be in (0, 1]");
  }
  if (k < 1 || n < 1 || max_length < 1) {
    throw DecodeError("k, n and max_length must be positive");
  }
  if (!(temperature > 0.0)) {
    throw DecodeError("temperature must be positive");
  }
}

std::vector<int> top_pk_candidates(std::span<const double> probs, double p, int k) {
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probs[a] > probs[b]; });
  double mass = 0.0;
  std::size_t j = 0;
  const auto cap = static_cast<std::size_t>(std::max(k, 1));
  while (j < order.size() && j < cap) {
    mass += probs[order[j]];
    ++j;
    if (mass >= p) {
      break;
    }
  }
  order.resize(j);
  return order;
}

int PolicyStepModel::eos() const { return tokenizer::kEos; }

lm::RowVector PolicyStepModel::mask(lm::RowVector logits) const {
  for (int id = 0; id < tokenizer::kSpecialCount && id < logits.size(); ++id) {
    if (id != tokenizer::kEos) {
      logits(id) = -std::numeric_limits<double>::infinity();
    }
  }
  return logits;
}

lm::RowVector PolicyStepModel::begin(std::span<const int> prompt) {
  session_ = std::make_unique<lm::PolicyModel::Session>(model_);
  return mask(session_->feed(prompt));
}

lm::RowVector PolicyStepModel::advance(int token) { return mask(session_->step(token)); }

Generation sample_sequence(StepModel& model, std::span<const int> prompt,
                           const DecodeParams& params, Rng& rng, const StepObserver& observer) {
  params.validate();
  Generation out;
  lm::RowVector logits = model.begin(prompt);
  std::vector<double> probs(static_cast<std::size_t>(logits.size()));
  std::vector<double> weights;
  for (int step = 0; step < params.max_length; ++step) {
    const double mx = logits.maxCoeff();
    double z = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      const double e = std::exp((logits(i) - mx) / params.temperature);
      probs[static_cast<std::size_t>(i)] = e;
      z += e;
    }
    for (double& v : probs) {
      v /= z;
    }
    const std::vector<int> candidates = top_pk_candidates(probs, params.p, params.k);
    weights.clear();
    for (const int c : candidates) {
      weights.push_back(probs[static_cast<std::size_t>(c)]);
    }
    // categorical() renormalizes over the candidate set
    const int token = candidates[rng.categorical(weights)];
    if (observer) {
      observer(candidates, token);
    }
    if (token == model.eos()) {
      out.complete = true;
      return out;
    }
    out.tokens.push_back(token);
    if (step + 1 < params.max_length) {
      logits = model.advance(token);
    }
  }
  // sequences without an end token are complete only at their fixed horizon
  out.complete = model.eos() < 0;
  return out;
}

BestOfN best_of_n(StepModel& model, std::span<const int> prompt, int n,
                  const RewardFn& reward, const DecodeParams& params,
                  std::uint64_t stream_seed) {
  if (n < 1) {
    throw DecodeError("best_of_n needs n >= 1");
  }
  BestOfN result;
  result.reward = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(stream_seed, static_cast<std::uint64_t>(i)));
    Generation g = sample_sequence(model, prompt, params, rng);
    const std::optional<double> r = reward(g);
    if (!r) {
      continue;
    }
    ++result.valid;
    if (result.index < 0 || *r > result.reward) {
      result.best = std::move(g);
      result.reward = *r;
      result.index = i;
    }
  }
  return result;
}

}  // namespace molspo::decode
