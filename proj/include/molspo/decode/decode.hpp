#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molspo/common/rng.hpp"
#include "molspo/lm/autodiff.hpp"
#include "molspo/lm/transformer.hpp"

namespace molspo::decode {

class DecodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DecodeParams {
  double p = 0.9;        // cumulative probability threshold
  int k = 15;            // candidate cap
  int n = 4;             // best-of-N draws
  int max_length = 128;  // generated tokens, EOS excluded
  double temperature = 1.0;
  std::uint64_t seed = 0;

  /// Throws DecodeError.
  void validate() const;
};

/// Smallest high-probability prefix of the tokens sorted by descending
/// probability (ties by ascending id) whose mass reaches p, capped at k.
std::vector<int> top_pk_candidates(std::span<const double> probs, double p, int k);

/// Autoregressive next-token source. Implementations may keep incremental
/// state between begin() and advance().
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual int vocab_size() const = 0;
  /// Token that ends a sequence, or -1 when sequences run to max length.
  virtual int eos() const = 0;
  /// Starts a new sequence; returns logits for the first generated token.
  virtual lm::RowVector begin(std::span<const int> prompt) = 0;
  /// Appends a token; returns logits for the next one.
  virtual lm::RowVector advance(int token) = 0;
};

/// Transformer policy over the tokenizer's ids. Special tokens other than
/// EOS are masked out of generation.
class PolicyStepModel final : public StepModel {
 public:
  explicit PolicyStepModel(const lm::PolicyModel& model) : model_(model) { }
  int vocab_size() const override { return model_.config().vocab; }
  int eos() const override;
  lm::RowVector begin(std::span<const int> prompt) override;
  lm::RowVector advance(int token) override;

 private:
  lm::RowVector mask(lm::RowVector logits) const;

  const lm::PolicyModel& model_;
  std::unique_ptr<lm::PolicyModel::Session> session_;
};

struct Generation {
  std::vector<int> tokens;  // generated ids, EOS excluded
  bool complete = false;    // false when max length was reached first
};

/// Called at each step with the candidate set and the chosen token.
using StepObserver = std::function<void(std::span<const int> candidates, int chosen)>;

/// Samples from the renormalized Top-PK set at every step.
Generation sample_sequence(StepModel& model, std::span<const int> prompt,
                           const DecodeParams& params, Rng& rng,
                           const StepObserver& observer = {});

/// Reward of a completion, or nullopt when it is invalid.
using RewardFn = std::function<std::optional<double>(const Generation&)>;

struct BestOfN {
  Generation best;
  double reward = 0.0;
  int index = -1;  // draw that won, -1 when all were invalid
  int valid = 0;

  bool all_invalid() const { return index < 0; }
};

/// N independent completions of `prompt`; draw i uses its own stream
/// derive_seed(stream_seed, i), so the first N draws do not depend on N.
/// Ties go to the earliest draw.
BestOfN best_of_n(StepModel& model, std::span<const int> prompt, int n,
                  const RewardFn& reward, const DecodeParams& params,
                  std::uint64_t stream_seed);

}  // namespace molspo::decode
