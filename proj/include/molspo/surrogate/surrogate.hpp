#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molspo/chem/molecule.hpp"
#include "molspo/common/rng.hpp"
#include "molspo/corpus/corpus.hpp"
#include "molspo/lm/autodiff.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::surrogate {

struct SurrogateConfig {
  int blocks = 5;
  int heads = 4;
  int dim = 64;
  int context = 160;
  int hidden = 64;  // regression head width
  double dropout = 0.0;
  double init_scale = 0.02;

  /// Throws CriticError(kBadSpec).
  void validate() const;
};

/// Encoder regressor: tokens of the canonical SMILES, transformer blocks
/// without a causal mask, mean pooling, then a two-layer head. Targets are
/// standardized with training-set statistics stored alongside the weights.
class SurrogateModel {
 public:
  SurrogateModel(tokenizer::Vocabulary vocab, const SurrogateConfig& config, std::uint64_t seed);

  const SurrogateConfig& config() const { return config_; }
  const tokenizer::Vocabulary& vocabulary() const { return vocab_; }
  std::vector<lm::Parameter>& parameters() { return params_; }

  /// [BOS] tokens [EOS] of the canonical form. Throws
  /// CriticError(kTokenizationFailure) for unparseable or untokenizable input.
  std::vector<int> encode(std::string_view smiles) const;
  std::vector<int> encode(const chem::Molecule& m) const;

  /// Standardized prediction recorded on a tape.
  lm::Var forward(lm::Tape& t, std::span<const int> ids, Rng* dropout_rng = nullptr);
  double predict_ids(std::span<const int> ids) const;
  double predict(std::string_view smiles) const;
  double predict(const chem::Molecule& m) const;

  void set_target_scaling(double mean, double scale);
  double target_mean() const { return mean_; }
  double target_scale() const { return scale_; }

  void save(const std::filesystem::path& path) const;
  /// Throws LmError(kCheckpointNotFound / kBadCheckpoint).
  static SurrogateModel load(const std::filesystem::path& path);

 private:
  SurrogateConfig config_;
  tokenizer::Vocabulary vocab_;
  std::vector<lm::Parameter> params_;
  lm::TransformerStack stack_;
  int w1_ = -1, b1_ = -1, w2_ = -1, b2_ = -1;
  double mean_ = 0.0;
  double scale_ = 1.0;
};

struct SurrogateTrainOptions {
  int epochs = 30;
  int batch = 16;
  double lr = 1e-3;
  double clip_norm = 1.0;
  double valid_fraction = 0.1;
  std::uint64_t seed = 0;
  /// Stop early once this many seconds have elapsed (0 = no limit).
  double time_budget_seconds = 0.0;
  std::function<void(int epoch, double train_mse, double valid_r2)> on_epoch;
};

struct SurrogateReport {
  std::vector<double> train_mse;  // per epoch, original units
  std::vector<double> valid_r2;   // per epoch
  double final_r2 = 0.0;          // NaN for a constant validation target
  double final_rmse = 0.0;
  std::size_t n_train = 0;
  std::size_t n_valid = 0;
};

struct TrainedSurrogate {
  SurrogateModel model;
  SurrogateReport report;
};

inline constexpr std::size_t kMinSurrogateRows = 100;

/// Shuffled 90/10 split, squared-error training with Adam. Throws
/// CriticError(kInsufficientData) below kMinSurrogateRows rows.
TrainedSurrogate train_surrogate(std::span<const corpus::ScoredMolecule> rows,
                                 const tokenizer::Vocabulary& vocab,
                                 const SurrogateConfig& config,
                                 const SurrogateTrainOptions& options);

/// 1 - SSE/SST; NaN when the target is constant.
double r_squared(std::span<const double> truth, std::span<const double> predicted);

/// Known-answer regression target: an affine function of heavy-atom and
/// ring counts plus Gaussian noise.
struct AffineTarget {
  double intercept = -4.0;
  double per_heavy_atom = -0.15;
  double per_ring = -0.5;
  double noise = 0.1;

  double exact(const chem::Molecule& m) const;
  double sample(const chem::Molecule& m, Rng& rng) const;
};

}  // namespace molspo::surrogate
