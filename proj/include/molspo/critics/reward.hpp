#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "molspo/chem/molecule.hpp"
#include "molspo/critics/sa_score.hpp"

namespace molspo::critics {

enum class Direction : std::uint8_t { kMaximize, kMinimize };

struct CriticSpec {
  std::string name;
  Direction direction = Direction::kMaximize;
  double lo = -10.0;
  double hi = 10.0;

  /// Throws CriticError(kBadSpec) unless lo < hi.
  void validate() const;
};

/// Clamp to [lo, hi] then map linearly onto [0, 1], flipped for minimize.
double normalize(double v, const CriticSpec& spec);

/// Fixed critic order; composite sums run in this order.
enum class Critic : std::uint8_t {
  kDocking,
  kDruglikeness,
  kSynthesizability,
  kSolubility,
};
inline constexpr std::size_t kCriticCount = 4;
const char* to_string(Critic c);

using CriticArray = std::array<double, kCriticCount>;

struct RewardWeights {
  double beta_sim = 0.2;
  double lambda_c = 0.2;

  /// lambda_c = (1 - beta) / 4. Throws CriticError(kBadSpec) unless
  /// beta is in (0, 1).
  static RewardWeights from_beta(double beta);
  bool sums_to_one() const;
};

struct CriticSpecs {
  std::array<CriticSpec, kCriticCount> critics{{
      {"docking", Direction::kMinimize, -10.0, 10.0},
      {"druglikeness", Direction::kMaximize, -10.0, 10.0},
      {"synthesizability", Direction::kMinimize, -10.0, 10.0},
      {"solubility", Direction::kMaximize, -10.0, 10.0},
  }};
  CriticSpec similarity{"similarity", Direction::kMaximize, 0.0, 1.0};

  const CriticSpec& operator[](Critic c) const {
    return critics[static_cast<std::size_t>(c)];
  }
  CriticSpec& operator[](Critic c) { return critics[static_cast<std::size_t>(c)]; }
  void validate() const;
};

struct RewardBreakdown {
  CriticArray raw{};
  CriticArray normalized{};
  double tanimoto_raw = 0;
  double tanimoto_normalized = 0;
  RewardWeights weights;
  double composite = 0;
};

/// beta * Norm(sim) + sum_i lambda * Norm(critic_i).
double combine(const CriticArray& normalized, double sim_normalized,
               const RewardWeights& w);

/// Equal-weight (0.25 each) mean of normalized critic values.
double original_reward(const CriticArray& normalized);

/// Deterministic stand-in for docking: a value in (-14, -6] derived from a
/// hash of the canonical SMILES.
double mock_docking_score(std::string_view canonical_smiles);

/// Docking callback receives the canonical SMILES of the molecule.
using DockingFn = std::function<double(const chem::Molecule&, std::string_view)>;

/// Raw critic values per molecule, memoized by canonical SMILES.
class CriticSuite {
 public:
  CriticSuite(CriticSpecs specs, FragmentTable fragments, DockingFn docking);

  const CriticSpecs& specs() const { return specs_; }
  const FragmentTable& fragments() const { return fragments_; }

  CriticArray raw(const chem::Molecule& m);
  CriticArray normalized(const CriticArray& raw) const;

  RewardBreakdown composite_reward(const chem::Molecule& x,
                                   const chem::Molecule& y,
                                   const RewardWeights& w);
  double original_reward(const chem::Molecule& x);

  std::size_t cache_size() const { return cache_.size(); }

 private:
  CriticSpecs specs_;
  FragmentTable fragments_;
  DockingFn docking_;
  std::unordered_map<std::string, CriticArray> cache_;
};

}  // namespace molspo::critics
