#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "molspo/critics/reward.hpp"

namespace molspo::harness {

struct GeneratedPair {
  std::string original;
  std::string generated;  // raw decoded text; may be invalid
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t valid = 0;
  std::size_t kept = 0;  // valid and past the similarity filter
  double validity = 0;
  double avg_norm_reward = 0;
  double top10_norm_reward = 0;
  critics::CriticArray critic_means{};
  double avg_tanimoto = 0;
  double novelty = 0;
  double diversity = 0;
  /// Set when nothing survived the filter; the reward and property
  /// fields are then NaN.
  bool empty_after_filter = false;
};

/// Mean of the ceil(fraction * n) largest values; NaN when empty.
double top_fraction_mean(std::span<const double> values, double fraction);

/// Canonical forms of the parseable entries; invalid ones are skipped.
std::vector<std::string> canonical_forms(std::span<const std::string> smiles);

/// Share of molecules whose canonical form is absent from `dataset`
/// (which must hold canonical forms). NaN when `generated` is empty.
double novelty(std::span<const std::string> generated_canonical,
               const std::unordered_set<std::string>& dataset);

/// Distinct canonical forms over total. NaN when empty.
double diversity(std::span<const std::string> generated_canonical);

/// Validity counts every pair; reward and property means use valid
/// generations with tanimoto >= similarity_filter (when set). Novelty and
/// diversity are taken over all valid generations.
EvalReport evaluate(std::span<const GeneratedPair> pairs, critics::CriticSuite& suite,
                    const critics::RewardWeights& weights,
                    const std::unordered_set<std::string>& dataset,
                    std::optional<double> similarity_filter);

/// Column names of a report row, in write order.
std::vector<std::string> report_columns();
std::vector<double> report_values(const EvalReport& r);

void write_report_csv(std::ostream& out, const EvalReport& r);
/// Throws HarnessError(kData) on a malformed file.
EvalReport read_report_csv(std::istream& in);

}  // namespace molspo::harness
