#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "molspo/critics/reward.hpp"
#include "molspo/critics/sa_score.hpp"

namespace molspo::harness {

/// Critic bounds matched to each critic's natural range: docking
/// [-14, -6] (minimize), QED [0, 1], SA [1, 10] (minimize), logP [-10, 10].
critics::CriticSpecs desk_critic_specs();

/// Mock docking on the canonical SMILES.
critics::DockingFn mock_docking();

/// Fragment table fitted on a one-SMILES-per-line file.
critics::FragmentTable fit_fragments(std::span<const std::string> smiles);

}  // namespace molspo::harness
