#include "molspo/lm/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "molspo/lm/checkpoint.hpp"
#include "molspo/lm/errors.hpp"

namespace molspo::lm {

namespace {

// Row i of the logits predicts token i + 1.
void target_rows(const tokenizer::SerializedPair& seq, std::vector<Eigen::Index>& rows,
                 std::vector<int>& targets) {
  rows.clear();
  targets.clear();
  for (std::size_t i = seq.target_begin; i < seq.target_end; ++i) {
    rows.push_back(static_cast<Eigen::Index>(i) - 1);
    targets.push_back(seq.ids[i]);
  }
}

}  // namespace

std::vector<EncodedPair> encode_pairs(const tokenizer::Vocabulary& vocab,
                                      std::span<const corpus::MoleculePair> pairs) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto x = vocab.encode(p.x);
    const auto y = vocab.encode(p.y);
    out.push_back({tokenizer::serialize_pair(x, y), p.tanimoto});
  }
  return out;
}

Var nll(Tape& t, PolicyModel& model, const tokenizer::SerializedPair& seq, Rng* dropout_rng) {
  // the final token is never an input
  const std::span<const int> inputs(seq.ids.data(), seq.ids.size() - 1);
  const Var logits = model.forward(t, inputs, dropout_rng);
  std::vector<Eigen::Index> rows;
  std::vector<int> targets;
  target_rows(seq, rows, targets);
  return cross_entropy(t, logits, rows, targets);
}

double nll(const PolicyModel& model, const tokenizer::SerializedPair& seq) {
  const std::span<const int> inputs(seq.ids.data(), seq.ids.size() - 1);
  const Matrix logits = model.logits(inputs);
  double total = 0.0;
  for (std::size_t i = seq.target_begin; i < seq.target_end; ++i) {
    total -= log_softmax(logits.row(static_cast<Eigen::Index>(i) - 1))(seq.ids[i]);
  }
  return total;
}

double nll(const PolicyModel& model, std::span<const int> x, std::span<const int> y) {
  return nll(model, tokenizer::serialize_pair(x, y));
}

double pair_weight(double similarity, double lambda_mix) {
  return lambda_mix / ((1.0 - lambda_mix) * std::max(similarity, kSimilarityFloor));
}

double pretrain_loss(const PolicyModel& model, std::span<const EncodedPair> pairs,
                     double lambda_mix) {
  if (pairs.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0.0;
  for (const auto& p : pairs) {
    total += pair_weight(p.similarity, lambda_mix) * nll(model, p.sequence);
  }
  return total / static_cast<double>(pairs.size());
}

double mean_nll(const PolicyModel& model, std::span<const EncodedPair> pairs) {
  if (pairs.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0.0;
  for (const auto& p : pairs) {
    total += nll(model, p.sequence);
  }
  return total / static_cast<double>(pairs.size());
}

std::vector<EpochStats> pretrain(PolicyModel& model, const tokenizer::Vocabulary& vocab,
                                 std::span<const EncodedPair> train,
                                 std::span<const EncodedPair> valid,
                                 const PretrainOptions& options) {
  if (train.empty()) {
    throw LmError(LmErrorKind::kEmptyCorpus, "no training pairs");
  }
  if (options.batch < 1 || options.epochs < 0) {
    throw LmError(LmErrorKind::kBadConfig, "batch must be positive");
  }
  if (options.checkpoint_dir) {
    std::filesystem::create_directories(*options.checkpoint_dir);
  }
  Adam adam(AdamConfig{options.lr});
  std::vector<std::size_t> order(train.size());
  std::vector<EpochStats> history;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(options.seed, static_cast<std::uint64_t>(2 * epoch)));
    Rng dropout_rng(derive_seed(options.seed, static_cast<std::uint64_t>(2 * epoch + 1)));
    shuffle_rng.shuffle(order.begin(), order.end());

    EpochStats stats;
    stats.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.batch));
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      model.zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        const EncodedPair& p = train[order[i]];
        const double w = pair_weight(p.similarity, options.lambda_mix);
        Tape t;
        const Var loss = nll(t, model, p.sequence, &dropout_rng);
        const double value = t.value(loss)(0, 0);
        stats.train_nll += value;
        stats.train_loss += w * value;
        t.backward(loss, w * inv_batch);
      }
      clip_grad_norm(model.parameters(), options.clip_norm);
      adam.step(model.parameters());
    }
    stats.train_nll /= static_cast<double>(train.size());
    stats.train_loss /= static_cast<double>(train.size());
    stats.valid_nll = mean_nll(model, valid);
    if (options.checkpoint_dir) {
      save_policy(*options.checkpoint_dir / ("epoch_" + std::to_string(epoch) + ".ckpt"), model,
                  vocab);
    }
    if (options.on_epoch) {
      options.on_epoch(stats);
    }
    history.push_back(stats);
  }
  model.zero_grad();
  return history;
}

}  // namespace molspo::lm
