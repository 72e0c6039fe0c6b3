#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "molspo/corpus/corpus.hpp"
#include "molspo/lm/autodiff.hpp"
#include "molspo/lm/optim.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::lm {

/// A tokenized training pair with its similarity weight input.
struct EncodedPair {
  tokenizer::SerializedPair sequence;
  double similarity = 1.0;
};

/// Throws TokenizerError for characters outside the vocabulary alphabet.
std::vector<EncodedPair> encode_pairs(const tokenizer::Vocabulary& vocab,
                                      std::span<const corpus::MoleculePair> pairs);

/// -sum log p over the target span, recorded on `t`.
Var nll(Tape& t, PolicyModel& model, const tokenizer::SerializedPair& seq,
        Rng* dropout_rng = nullptr);
/// Value-only variants. Throw LmError(kContextOverflow).
double nll(const PolicyModel& model, const tokenizer::SerializedPair& seq);
double nll(const PolicyModel& model, std::span<const int> x, std::span<const int> y);

inline constexpr double kSimilarityFloor = 0.05;

/// lambda / ((1 - lambda) * max(similarity, floor)).
double pair_weight(double similarity, double lambda_mix);

/// Mean over pairs of pair_weight * NLL.
double pretrain_loss(const PolicyModel& model, std::span<const EncodedPair> pairs,
                     double lambda_mix);

struct EpochStats {
  int epoch = 0;
  double train_nll = 0;   // mean per pair
  double train_loss = 0;  // mean weighted loss
  double valid_nll = 0;   // mean per pair, NaN without a validation split
};

struct PretrainOptions {
  int epochs = 10;
  int batch = 24;
  double lr = 5e-5;
  double lambda_mix = 0.5;
  double clip_norm = 1.0;
  std::uint64_t seed = 0;
  /// When set, epoch_<n>.ckpt files are written here.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(const EpochStats&)> on_epoch;
};

/// Minibatch Adam on the similarity-weighted NLL. Deterministic in the
/// seed; dropout masks and shuffles come from streams derived from it.
std::vector<EpochStats> pretrain(PolicyModel& model, const tokenizer::Vocabulary& vocab,
                                 std::span<const EncodedPair> train,
                                 std::span<const EncodedPair> valid,
                                 const PretrainOptions& options);

/// Mean NLL per pair; NaN for an empty set.
double mean_nll(const PolicyModel& model, std::span<const EncodedPair> pairs);

}  // namespace molspo::lm
