#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molspo/common/rng.hpp"
#include "molspo/fp/fingerprint.hpp"

namespace molspo::corpus {

enum class CorpusErrorKind : std::uint8_t {
  kTooFewMolecules,
  kInsufficientRows,
  kBadCsv,
  kBadFile,
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(CorpusErrorKind kind, const std::string& detail);
  CorpusErrorKind kind() const { return kind_; }

 private:
  CorpusErrorKind kind_;
};

inline constexpr double kPairSimilarityThreshold = 0.5;

/// What eligibility needs from one molecule, computed once.
struct PairFeatures {
  std::string canonical;
  fp::Fingerprint fingerprint{64};
  std::string scaffold;  // canonical scaffold SMILES, empty when acyclic
};

/// Parse errors from the SMILES reader propagate.
PairFeatures pair_features(std::string_view smiles);

/// Similar enough or sharing a (non-empty) ring scaffold.
bool pair_eligible(const PairFeatures& x, const PairFeatures& y);
bool pair_eligible(std::string_view x, std::string_view y);

struct MoleculePair {
  std::string x;
  std::string y;
  double tanimoto = 0.0;
  bool same_scaffold = false;

  friend bool operator==(const MoleculePair&, const MoleculePair&) = default;
};

struct PairCorpus {
  std::vector<MoleculePair> train;
  std::vector<MoleculePair> valid;
  std::size_t attempts = 0;
  /// Pairs still missing when the attempt budget ran out; 0 on success.
  std::size_t shortfall = 0;

  bool budget_exhausted() const { return shortfall > 0; }
  std::size_t size() const { return train.size() + valid.size(); }
};

inline constexpr std::size_t kAttemptsPerPair = 50;

/// Rejection-samples ordered pairs (X != Y) without duplicates. The final
/// `1 - train_fraction` share of accepted pairs becomes the validation split.
/// Molecules are stored in canonical form.
PairCorpus build_pretrain_corpus(std::span<const std::string> molecules,
                                 std::size_t n_pairs, std::uint64_t seed,
                                 double train_fraction = 0.9);

/// TSV rows `X\tY\ttanimoto`.
void write_pairs(std::ostream& out, std::span<const MoleculePair> pairs);
std::vector<MoleculePair> read_pairs(std::istream& in);
void save_pairs(const std::filesystem::path& path, std::span<const MoleculePair> pairs);
std::vector<MoleculePair> load_pairs(const std::filesystem::path& path);

/// One SMILES per line; blank lines skipped.
std::vector<std::string> load_smiles(const std::filesystem::path& path);

struct ScoredMolecule {
  std::string smiles;
  double docking_score = 0.0;

  friend bool operator==(const ScoredMolecule&, const ScoredMolecule&) = default;
};

/// CSV with header `smiles,docking_score`.
std::vector<ScoredMolecule> read_scored_csv(std::istream& in);
std::vector<ScoredMolecule> load_scored_csv(const std::filesystem::path& path);
void save_scored_csv(const std::filesystem::path& path,
                     std::span<const ScoredMolecule> rows);

inline constexpr double kBufferScoreLow = -14.0;
inline constexpr double kBufferScoreHigh = -6.0;
inline constexpr std::size_t kDefaultBufferSize = 1280;

/// Fine-tuning start molecules; draws are uniform over the buffer.
class FinetuneBuffer {
 public:
  explicit FinetuneBuffer(std::vector<ScoredMolecule> molecules);

  std::size_t size() const { return molecules_.size(); }
  const std::vector<ScoredMolecule>& molecules() const { return molecules_; }
  const ScoredMolecule& sample(Rng& rng) const;

 private:
  std::vector<ScoredMolecule> molecules_;
};

/// Keeps rows with score in [lo, hi] and draws `size` of them without
/// replacement. Throws CorpusError(kInsufficientRows).
FinetuneBuffer build_finetune_buffer(std::span<const ScoredMolecule> rows,
                                     std::size_t size, std::uint64_t seed,
                                     double lo = kBufferScoreLow,
                                     double hi = kBufferScoreHigh);

}  // namespace molspo::corpus
