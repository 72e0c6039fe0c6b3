#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molspo/chem/molecule.hpp"
#include "molspo/corpus/corpus.hpp"
#include "molspo/critics/reward.hpp"
#include "molspo/decode/decode.hpp"
#include "molspo/lm/optim.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/spo/advantage.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::spo {

struct SpoConfig {
  int epochs = 100;
  int batch = 64;
  double lr = 1e-5;
  double beta_sim = 0.2;
  decode::DecodeParams decode;
  InvalidMode invalid_mode = InvalidMode::kZero;
  int partial_samples = 1;
  /// false drops the partial-molecule term (R^AP = full advantage).
  bool use_partial = true;
  /// true keeps a roll-out copy frozen for each epoch instead of using
  /// the learner itself at every step.
  bool frozen_rollout = false;
  double clip_norm = 1.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Decodes token ids into molecules and scores them against an original.
class SpoScorer {
 public:
  SpoScorer(critics::CriticSuite& suite, const tokenizer::Vocabulary& vocab,
            critics::RewardWeights weights);

  const critics::RewardWeights& weights() const { return weights_; }
  critics::CriticSuite& suite() { return suite_; }
  const tokenizer::Vocabulary& vocab() const { return vocab_; }

  /// nullopt unless the ids decode to a parseable, non-empty molecule.
  std::optional<chem::Molecule> molecule(std::span<const int> tokens) const;
  critics::RewardBreakdown breakdown(const chem::Molecule& x, const chem::Molecule& y);
  /// R_c(X | X).
  double reward_x(const chem::Molecule& x);
  /// Composite reward of token sequences relative to x.
  SequenceReward reward_fn(const chem::Molecule& x);

 private:
  critics::CriticSuite& suite_;
  const tokenizer::Vocabulary& vocab_;
  critics::RewardWeights weights_;
};

struct GenerationRecord {
  std::string x_smiles;
  std::vector<int> x_ids;
  std::vector<int> y_ids;  // EOS excluded
  std::string y_smiles;    // canonical when valid, raw decode otherwise
  bool complete = false;
  bool valid = false;
  double reward_x = 0.0;
  std::optional<critics::RewardBreakdown> breakdown;
  double full = 0.0;
  std::vector<double> partials;
  std::vector<int> j_used;  // Y-side split point per partial draw
  double r_ap = 0.0;
};

/// Generates Y ~ pi(.|X) with Top-PK and computes the advantage
/// preference using `rollout` for partial completions.
GenerationRecord make_record(const lm::PolicyModel& policy, const lm::PolicyModel& rollout,
                             SpoScorer& scorer, const std::string& x_smiles,
                             const SpoConfig& config, std::uint64_t seed);

/// Serialized training sequence of a record: EOS closes Y only if it was
/// generated.
tokenizer::SerializedPair record_sequence(const GenerationRecord& r);

struct StepResult {
  double grad_norm = 0.0;
  bool applied = false;  // false when every advantage was zero
};

/// Ascent on mean_b R^AP_b * log pi(Y_b | X_b). With all advantages zero
/// the gradient is exactly zero and no optimizer step is taken.
StepResult gradient_step(lm::PolicyModel& model, lm::Adam& adam,
                         std::span<const GenerationRecord> records, double clip_norm);

struct EpochMetrics {
  int epoch = 0;
  std::size_t records = 0;
  double mean_rap = 0;
  double mean_full = 0;
  double mean_partial = 0;
  double validity = 0;
  double avg_norm_reward = 0;  // composite over valid Y; NaN without any
  double avg_tanimoto = 0;
  critics::CriticArray critic_means{};  // raw values over valid Y
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const EpochMetrics& m);

/// Highest avg_norm_reward, earliest on ties; 0 if the list is empty.
int best_epoch(std::span<const EpochMetrics> history);

struct FinetuneResult {
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
  std::vector<lm::Parameter> best_parameters;
};

using EpochCallback = std::function<void(const EpochMetrics&, const lm::PolicyModel&,
                                         std::span<const GenerationRecord>)>;

/// Each epoch visits the buffer once in a seeded shuffled order (uniform
/// start distribution), in batches; every batch generates, scores and
/// applies one gradient step.
FinetuneResult finetune(lm::PolicyModel& model, const tokenizer::Vocabulary& vocab,
                        const corpus::FinetuneBuffer& buffer, critics::CriticSuite& suite,
                        const SpoConfig& config, const EpochCallback& on_epoch = {});

}  // namespace molspo::spo
