#include "molspo/spo/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace molspo::spo {

const char* to_string(InvalidMode mode) {
  return mode == InvalidMode::kZero ? "zero" : "minus_rc_x";
}

InvalidMode parse_invalid_mode(const std::string& text) {
  if (text == "zero") {
    return InvalidMode::kZero;
  }
  if (text == "minus_rc_x") {
    return InvalidMode::kMinusRcX;
  }
  throw std::invalid_argument("invalid mode must be zero or minus_rc_x, got '" + text + "'");
}

double full_advantage(std::optional<double> reward_y, double reward_x, InvalidMode mode) {
  if (reward_y) {
    return *reward_y - reward_x;
  }
  return mode == InvalidMode::kZero ? 0.0 : -reward_x;
}

int prefix_length(double u, std::size_t length) {
  const auto n = static_cast<int>(length);
  const int j = static_cast<int>(std::ceil(u * static_cast<double>(n)));
  return std::clamp(j, 1, std::max(n, 1));
}

namespace {

// Best reward over completions of `prefix`, nullopt when none is valid.
std::optional<double> best_completion(decode::StepModel& rollout, std::span<const int> context,
                                      std::span<const int> full, int j, int n,
                                      const SequenceReward& reward,
                                      const decode::DecodeParams& params, std::uint64_t seed) {
  if (j >= static_cast<int>(full.size())) {
    return reward(full);
  }
  std::vector<int> prompt(context.begin(), context.end());
  prompt.insert(prompt.end(), full.begin(), full.begin() + j);
  decode::DecodeParams p = params;
  p.max_length = std::max(1, params.max_length - j);
  std::vector<int> tokens(full.begin(), full.begin() + j);
  const decode::RewardFn score = [&](const decode::Generation& g) -> std::optional<double> {
    if (!g.complete) {
      return std::nullopt;
    }
    tokens.resize(static_cast<std::size_t>(j));
    tokens.insert(tokens.end(), g.tokens.begin(), g.tokens.end());
    return reward(tokens);
  };
  const decode::BestOfN best = decode::best_of_n(rollout, prompt, n, score, p, seed);
  if (best.all_invalid()) {
    return std::nullopt;
  }
  return best.reward;
}

}  // namespace

double partial_advantage(decode::StepModel& rollout, std::span<const int> context,
                         std::span<const int> x, std::span<const int> y, double u, int n,
                         const SequenceReward& reward, const decode::DecodeParams& params,
                         InvalidMode mode, std::uint64_t seed, PartialDetail* detail) {
  PartialDetail d;
  d.j_y = prefix_length(u, y.size());
  d.j_x = prefix_length(u, x.size());
  const auto by = best_completion(rollout, context, y, d.j_y, n, reward, params,
                                  derive_seed(seed, 1));
  const auto bx = best_completion(rollout, context, x, d.j_x, n, reward, params,
                                  derive_seed(seed, 2));
  d.x_invalid = !bx.has_value();
  d.y_invalid = !by.has_value();
  d.best_x = bx ? *bx : reward(x).value_or(0.0);
  d.best_y = by.value_or(0.0);
  const double out = full_advantage(by, d.best_x, mode);
  if (detail != nullptr) {
    *detail = d;
  }
  return out;
}

double combine_advantage(std::span<const double> partials, double full) {
  if (partials.empty()) {
    return full;
  }
  const double mean = std::accumulate(partials.begin(), partials.end(), 0.0) /
                      static_cast<double>(partials.size());
  return 0.5 * mean + 0.5 * full;
}

}  // namespace molspo::spo
