#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "molspo/chem/molecule.hpp"

namespace molspo::critics {

/// Occurrence counts of radius <= 2 circular environments over a corpus.
class FragmentTable {
 public:
  FragmentTable() = default;

  /// Throws CriticError(kEmptyCorpus).
  static FragmentTable fit(std::span<const chem::Molecule> corpus);

  bool empty() const { return total_ == 0; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::uint64_t hash) const;
  const std::map<std::uint64_t, std::uint64_t>& counts() const { return counts_; }

  /// Natural-log frequency; unseen fragments get half a count.
  double log_frequency(std::uint64_t hash) const;
  /// log_frequency of an unseen fragment.
  double unseen_log_frequency() const;
  /// Log-frequency of the least common fragment among the most common ones
  /// that together cover 80% of all occurrences.
  double reference_log_frequency() const;

  std::string serialize() const;
  static FragmentTable parse(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static FragmentTable load(const std::filesystem::path& path);

 private:
  std::map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct SaTerms {
  /// Mean base-10 log of frequency over the reference frequency, clamped
  /// to [-4, 2.5].
  double fragment_score;
  double size_penalty;
  double stereo_penalty;
  double spiro_penalty;
  double bridge_penalty;
  double macrocycle_penalty;
  double symmetry_bonus;
  double score;  // final, in [1, 10]
};

/// Synthetic accessibility, 1 (easy) to 10 (hard). Throws
/// CriticError(kTableMissing) when the table is empty.
SaTerms sa_terms(const chem::Molecule& m, const FragmentTable& table);
double sa_score(const chem::Molecule& m, const FragmentTable& table);

}  // namespace molspo::critics
