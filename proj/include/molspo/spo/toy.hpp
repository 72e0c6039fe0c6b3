#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "molspo/decode/decode.hpp"
#include "molspo/lm/autodiff.hpp"

// Exhaustively enumerable environments: small vocabularies, fixed horizon,
// a reward table over every sequence. Used to check the advantage and
// gradient machinery against exact expectations.
namespace molspo::spo::toy {

class StrictImprovementViolated : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Sequence = std::vector<int>;

struct Environment {
  int vocab = 3;
  int horizon = 3;
  std::vector<double> rewards;     // one per sequence, index = base-vocab digits
  std::vector<Sequence> originals; // start molecules, uniform start distribution

  /// Rewards i.i.d. uniform in [0, 1); `originals` random sequences.
  static Environment random(int vocab, int horizon, int n_originals, std::uint64_t seed);
  static Environment constant(int vocab, int horizon, int n_originals, double value);

  std::size_t sequence_count() const { return rewards.size(); }
  Sequence sequence(std::size_t index) const;
  std::size_t index(std::span<const int> seq) const;
  double reward(std::span<const int> seq) const { return rewards[index(seq)]; }
  double best_reward() const;
};

/// Exact best-of-N oracle: the highest reward over all completions of the
/// prefix (the prefix itself when it is a full sequence).
double best_completion(const Environment& env, std::span<const int> prefix);

/// r_BON(j) for both sides under the oracle: best(Y[:j]) - best(X[:j]).
double oracle_partial_advantage(const Environment& env, std::span<const int> x,
                                std::span<const int> y, int j);

/// 1/2 * mean_j r_BON(j) + 1/2 * (R(Y) - R(X)), j over 1..T.
double oracle_advantage_preference(const Environment& env, std::span<const int> x,
                                   std::span<const int> y);

/// Softmax policy with one logit row per (original, prefix) state.
class TabularPolicy final : public decode::StepModel {
 public:
  TabularPolicy(const Environment& env, double init_scale, std::uint64_t seed);

  int vocab_size() const override { return vocab_; }
  int eos() const override { return -1; }
  /// The prompt is [original index]; the policy is conditioned on it.
  lm::RowVector begin(std::span<const int> prompt) override;
  lm::RowVector advance(int token) override;

  std::size_t parameter_count() const { return static_cast<std::size_t>(theta_.size()); }
  lm::Matrix& theta() { return theta_; }
  const lm::Matrix& theta() const { return theta_; }

  /// Row of the (original, prefix) state.
  Eigen::Index state(int original, std::span<const int> prefix) const;
  /// log pi(seq[0..t) | original).
  double log_prob(int original, std::span<const int> seq, int t) const;
  /// Gradient of log pi(seq[0..t) | original) w.r.t. theta.
  lm::Matrix grad_log_prob(int original, std::span<const int> seq, int t) const;

 private:
  int vocab_;
  int horizon_;
  std::size_t prefixes_per_original_;
  lm::Matrix theta_;
  int current_original_ = 0;
  Sequence current_;
};

/// E_{X ~ rho0, Y ~ pi}[grad log pi(Y|X) * R^AP(Y, X)] by enumeration,
/// R^AP under the oracle.
lm::Matrix expected_gradient(const TabularPolicy& policy, const Environment& env);

struct LemmaReport {
  bool literal = true;            // every deterministic policy enumerated
  double policies = 0;            // number of deterministic policies, per original
  std::size_t argmax_j = 0;       // size of argmax set of J (summed over originals)
  std::size_t argmax_j0 = 0;      // same for J0
  bool sets_equal = false;
  double strict_fraction = 1.0;   // share of (suboptimal Y, j < T) with strict BON gain
};

/// Enumerates deterministic policies per original, computes J (mean over
/// j of partial terms and the full term, halves) and J0 (R(Y) - R(X)), and
/// compares their argmax sets. Policies of one original differ only in the
/// sequence they emit, so above a size limit the enumeration runs over
/// sequences weighted by the number of policies emitting each one.
/// Throws StrictImprovementViolated if the oracle ever falls below the
/// current molecule.
LemmaReport verify_lemma_equivalence(const Environment& env);

}  // namespace molspo::spo::toy
