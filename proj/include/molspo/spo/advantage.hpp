#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molspo/decode/decode.hpp"

namespace molspo::spo {

/// What an invalid generated molecule is worth as an advantage.
enum class InvalidMode : std::uint8_t {
  kZero,      // advantage 0
  kMinusRcX,  // minus the original's composite reward
};

const char* to_string(InvalidMode mode);
/// Accepts "zero" and "minus_rc_x"; throws std::invalid_argument.
InvalidMode parse_invalid_mode(const std::string& text);

/// Composite reward of a complete token sequence, nullopt when the
/// sequence is not a valid molecule.
using SequenceReward = std::function<std::optional<double>(std::span<const int> tokens)>;

/// R_c(Y) - R_c(X) for a valid Y; otherwise the invalid value.
double full_advantage(std::optional<double> reward_y, double reward_x, InvalidMode mode);

/// Split point ceil(u * length), clamped to [1, length].
int prefix_length(double u, std::size_t length);

struct PartialDetail {
  int j_x = 0;
  int j_y = 0;
  double best_y = 0;   // reward of the best Y completion
  double best_x = 0;   // reward of the best X completion
  bool y_invalid = false;
  bool x_invalid = false;
};

/// Best-of-N completion of Y[1..j_Y] and X[1..j_X] under the roll-out
/// model, both conditioned on `context`; returns best(Y) - best(X). A prefix
/// that is the whole sequence completes to itself. Completion budgets are
/// params.max_length minus the prefix length. If every Y completion is
/// invalid the invalid contract applies against best(X); if every X
/// completion is invalid, R_c(X) stands in for best(X). Only scalar
/// rewards come back, so nothing here records gradients.
double partial_advantage(decode::StepModel& rollout, std::span<const int> context,
                         std::span<const int> x, std::span<const int> y, double u, int n,
                         const SequenceReward& reward, const decode::DecodeParams& params,
                         InvalidMode mode, std::uint64_t seed, PartialDetail* detail = nullptr);

/// 1/2 * mean(partials) + 1/2 * full; just `full` when partials is empty.
double combine_advantage(std::span<const double> partials, double full);

}  // namespace molspo::spo
