#include "molspo/critics/reward.hpp"

#include <algorithm>
#include <cmath>

#include "molspo/chem/smiles.hpp"
#include "molspo/critics/descriptors.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/fp/fingerprint.hpp"

namespace molspo::critics {

void CriticSpec::validate() const {
  if (!(lo < hi)) {
    throw CriticError(CriticErrorKind::kBadSpec, name + ": lo must be below hi");
  }
}

double normalize(double v, const CriticSpec& spec) {
  const double c = std::clamp(v, spec.lo, spec.hi);
  const double span = spec.hi - spec.lo;
  return spec.direction == Direction::kMaximize ? (c - spec.lo) / span
                                                : (spec.hi - c) / span;
}

const char* to_string(Critic c) {
  switch (c) {
  case Critic::kDocking:
    return "docking";
  case Critic::kDruglikeness:
    return "druglikeness";
  case Critic::kSynthesizability:
    return "synthesizability";
  case Critic::kSolubility:
    return "solubility";
  }
  return "unknown";
}

RewardWeights RewardWeights::from_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw CriticError(CriticErrorKind::kBadSpec, "beta must lie in (0, 1)");
  }
  return {beta, (1.0 - beta) / static_cast<double>(kCriticCount)};
}

bool RewardWeights::sums_to_one() const {
  return std::abs(beta_sim + kCriticCount * lambda_c - 1.0) < 1e-12;
}

void CriticSpecs::validate() const {
  for (const auto& c : critics) {
    c.validate();
  }
  similarity.validate();
}

double combine(const CriticArray& normalized, double sim_normalized,
               const RewardWeights& w) {
  double total = w.beta_sim * sim_normalized;
  for (const double v : normalized) {
    total += w.lambda_c * v;
  }
  return total;
}

double original_reward(const CriticArray& normalized) {
  double total = 0;
  for (const double v : normalized) {
    total += 0.25 * v;
  }
  return total;
}

double mock_docking_score(std::string_view canonical_smiles) {
  const auto bucket = fp::fnv1a64(canonical_smiles) % 1000;
  return -6.0 - 8.0 * static_cast<double>(bucket) / 1000.0;
}

CriticSuite::CriticSuite(CriticSpecs specs, FragmentTable fragments,
                         DockingFn docking)
    : specs_(std::move(specs)),
      fragments_(std::move(fragments)),
      docking_(std::move(docking)) {
  specs_.validate();
}

CriticArray CriticSuite::raw(const chem::Molecule& m) {
  std::string key = chem::write_smiles(m);
  if (const auto it = cache_.find(key); it != cache_.end()) {
    return it->second;
  }
  CriticArray values{};
  values[static_cast<std::size_t>(Critic::kDocking)] = docking_(m, key);
  values[static_cast<std::size_t>(Critic::kDruglikeness)] = qed(m);
  values[static_cast<std::size_t>(Critic::kSynthesizability)] =
      sa_score(m, fragments_);
  values[static_cast<std::size_t>(Critic::kSolubility)] = crippen_logp(m);
  cache_.emplace(std::move(key), values);
  return values;
}

CriticArray CriticSuite::normalized(const CriticArray& raw) const {
  CriticArray out{};
  for (std::size_t i = 0; i < kCriticCount; ++i) {
    out[i] = normalize(raw[i], specs_.critics[i]);
  }
  return out;
}

RewardBreakdown CriticSuite::composite_reward(const chem::Molecule& x,
                                              const chem::Molecule& y,
                                              const RewardWeights& w) {
  RewardBreakdown b;
  b.raw = raw(y);
  b.normalized = normalized(b.raw);
  b.tanimoto_raw =
      fp::tanimoto(fp::morgan_fingerprint(x), fp::morgan_fingerprint(y));
  b.tanimoto_normalized = normalize(b.tanimoto_raw, specs_.similarity);
  b.weights = w;
  b.composite = combine(b.normalized, b.tanimoto_normalized, w);
  return b;
}

double CriticSuite::original_reward(const chem::Molecule& x) {
  return critics::original_reward(normalized(raw(x)));
}

}  // namespace molspo::critics
