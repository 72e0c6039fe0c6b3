#include "molspo/harness/critics_setup.hpp"

#include <vector>

#include "molspo/chem/smiles.hpp"

namespace molspo::harness {

critics::CriticSpecs desk_critic_specs() {
  using critics::Critic;
  using critics::Direction;
  critics::CriticSpecs specs;
  specs[Critic::kDocking] = {"docking", Direction::kMinimize, -14.0, -6.0};
  specs[Critic::kDruglikeness] = {"druglikeness", Direction::kMaximize, 0.0, 1.0};
  specs[Critic::kSynthesizability] = {"synthesizability", Direction::kMinimize, 1.0, 10.0};
  specs[Critic::kSolubility] = {"solubility", Direction::kMaximize, -10.0, 10.0};
  return specs;
}

critics::DockingFn mock_docking() {
  return [](const chem::Molecule&, std::string_view canonical) {
    return critics::mock_docking_score(canonical);
  };
}

critics::FragmentTable fit_fragments(std::span<const std::string> smiles) {
  std::vector<chem::Molecule> mols;
  mols.reserve(smiles.size());
  for (const auto& s : smiles) {
    mols.push_back(chem::parse_smiles(s));
  }
  return critics::FragmentTable::fit(mols);
}

}  // namespace molspo::harness
