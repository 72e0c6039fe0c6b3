#include "molspo/spo/toy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "molspo/spo/advantage.hpp"

namespace molspo::spo::toy {

namespace {

constexpr double kTie = 1e-12;
constexpr double kLiteralLimit = 1 << 22;

std::size_t ipow(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

// Prefix id within one original: prefixes ordered by length, then digits.
std::size_t prefix_id(int vocab, std::span<const int> prefix) {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < prefix.size(); ++l) {
    offset += ipow(vocab, static_cast<int>(l));
  }
  std::size_t code = 0;
  for (const int t : prefix) {
    code = code * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(t);
  }
  return offset + code;
}

}  // namespace

Environment Environment::random(int vocab, int horizon, int n_originals, std::uint64_t seed) {
  Environment env;
  env.vocab = vocab;
  env.horizon = horizon;
  Rng rng(seed);
  env.rewards.resize(ipow(vocab, horizon));
  for (double& r : env.rewards) {
    r = rng.uniform();
  }
  for (int i = 0; i < n_originals; ++i) {
    env.originals.push_back(env.sequence(rng.below(env.rewards.size())));
  }
  return env;
}

Environment Environment::constant(int vocab, int horizon, int n_originals, double value) {
  Environment env = random(vocab, horizon, n_originals, 0);
  std::fill(env.rewards.begin(), env.rewards.end(), value);
  return env;
}

Sequence Environment::sequence(std::size_t index) const {
  Sequence s(static_cast<std::size_t>(horizon));
  for (int i = horizon - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(vocab));
    index /= static_cast<std::size_t>(vocab);
  }
  return s;
}

std::size_t Environment::index(std::span<const int> seq) const {
  if (static_cast<int>(seq.size()) != horizon) {
    throw std::invalid_argument("toy sequence length differs from horizon");
  }
  std::size_t code = 0;
  for (const int t : seq) {
    code = code * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(t);
  }
  return code;
}

double Environment::best_reward() const { return *std::max_element(rewards.begin(), rewards.end()); }

double best_completion(const Environment& env, std::span<const int> prefix) {
  const int free = env.horizon - static_cast<int>(prefix.size());
  std::size_t base = 0;
  for (const int t : prefix) {
    base = base * static_cast<std::size_t>(env.vocab) + static_cast<std::size_t>(t);
  }
  const std::size_t span = ipow(env.vocab, free);
  base *= span;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < span; ++i) {
    best = std::max(best, env.rewards[base + i]);
  }
  return best;
}

double oracle_partial_advantage(const Environment& env, std::span<const int> x,
                                std::span<const int> y, int j) {
  const auto jj = static_cast<std::size_t>(j);
  return best_completion(env, y.first(jj)) - best_completion(env, x.first(jj));
}

double oracle_advantage_preference(const Environment& env, std::span<const int> x,
                                   std::span<const int> y) {
  std::vector<double> partials;
  for (int j = 1; j <= env.horizon; ++j) {
    partials.push_back(oracle_partial_advantage(env, x, y, j));
  }
  return combine_advantage(partials, full_advantage(env.reward(y), env.reward(x), InvalidMode::kZero));
}

TabularPolicy::TabularPolicy(const Environment& env, double init_scale, std::uint64_t seed)
    : vocab_(env.vocab), horizon_(env.horizon) {
  prefixes_per_original_ = 0;
  for (int l = 0; l < horizon_; ++l) {
    prefixes_per_original_ += ipow(vocab_, l);
  }
  theta_.resize(static_cast<Eigen::Index>(prefixes_per_original_ * env.originals.size()), vocab_);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    theta_.data()[i] = init_scale * rng.normal();
  }
}

Eigen::Index TabularPolicy::state(int original, std::span<const int> prefix) const {
  return static_cast<Eigen::Index>(static_cast<std::size_t>(original) * prefixes_per_original_ +
                                   prefix_id(vocab_, prefix));
}

lm::RowVector TabularPolicy::begin(std::span<const int> prompt) {
  current_original_ = prompt.empty() ? 0 : prompt[0];
  current_.assign(prompt.begin() + (prompt.empty() ? 0 : 1), prompt.end());
  return theta_.row(state(current_original_, current_));
}

lm::RowVector TabularPolicy::advance(int token) {
  current_.push_back(token);
  if (static_cast<int>(current_.size()) >= horizon_) {
    // past the horizon nothing is sampled; return a harmless row
    return lm::RowVector::Zero(vocab_);
  }
  return theta_.row(state(current_original_, current_));
}

double TabularPolicy::log_prob(int original, std::span<const int> seq, int t) const {
  double lp = 0.0;
  for (int s = 0; s < t; ++s) {
    const auto row = state(original, seq.first(static_cast<std::size_t>(s)));
    lp += lm::log_softmax(theta_.row(row))(seq[static_cast<std::size_t>(s)]);
  }
  return lp;
}

lm::Matrix TabularPolicy::grad_log_prob(int original, std::span<const int> seq, int t) const {
  lm::Matrix g = lm::Matrix::Zero(theta_.rows(), theta_.cols());
  for (int s = 0; s < t; ++s) {
    const auto row = state(original, seq.first(static_cast<std::size_t>(s)));
    g.row(row) -= lm::log_softmax(theta_.row(row)).array().exp().matrix();
    g(row, seq[static_cast<std::size_t>(s)]) += 1.0;
  }
  return g;
}

lm::Matrix expected_gradient(const TabularPolicy& policy, const Environment& env) {
  lm::Matrix g = lm::Matrix::Zero(policy.theta().rows(), policy.theta().cols());
  const double rho = 1.0 / static_cast<double>(env.originals.size());
  for (std::size_t o = 0; o < env.originals.size(); ++o) {
    const Sequence& x = env.originals[o];
    for (std::size_t i = 0; i < env.sequence_count(); ++i) {
      const Sequence y = env.sequence(i);
      const int oi = static_cast<int>(o);
      const double p = std::exp(policy.log_prob(oi, y, env.horizon));
      g += rho * p * oracle_advantage_preference(env, x, y) *
           policy.grad_log_prob(oi, y, env.horizon);
    }
  }
  return g;
}

LemmaReport verify_lemma_equivalence(const Environment& env) {
  LemmaReport report;
  const double best = env.best_reward();
  std::size_t strict = 0;
  std::size_t checked = 0;

  // per-sequence objective values
  std::size_t states = 0;
  for (int l = 0; l < env.horizon; ++l) {
    states += ipow(env.vocab, l);
  }
  report.policies = std::pow(static_cast<double>(env.vocab), static_cast<double>(states));
  report.literal = report.policies <= kLiteralLimit;
  report.sets_equal = true;

  for (const Sequence& x : env.originals) {
    std::vector<double> j_val(env.sequence_count());
    std::vector<double> j0_val(env.sequence_count());
    for (std::size_t i = 0; i < env.sequence_count(); ++i) {
      const Sequence y = env.sequence(i);
      const double ry = env.reward(y);
      for (int j = 1; j <= env.horizon; ++j) {
        const double b = best_completion(env, std::span<const int>(y).first(static_cast<std::size_t>(j)));
        if (b < ry) {
          throw StrictImprovementViolated("best completion below the current sequence");
        }
        if (ry < best - kTie && j < env.horizon) {
          ++checked;
          strict += b > ry + kTie ? 1 : 0;
        }
      }
      j_val[i] = oracle_advantage_preference(env, x, y);
      j0_val[i] = ry - env.reward(x);
    }

    if (report.literal) {
      // every assignment of an action to each state
      const auto n = static_cast<std::size_t>(report.policies);
      std::vector<double> jp(n), j0p(n);
      std::vector<int> action(states, 0);
      for (std::size_t pol = 0; pol < n; ++pol) {
        std::size_t code = pol;
        for (std::size_t s = 0; s < states; ++s) {
          action[s] = static_cast<int>(code % static_cast<std::size_t>(env.vocab));
          code /= static_cast<std::size_t>(env.vocab);
        }
        Sequence y;
        for (int t = 0; t < env.horizon; ++t) {
          y.push_back(action[prefix_id(env.vocab, y)]);
        }
        const std::size_t idx = env.index(y);
        jp[pol] = j_val[idx];
        j0p[pol] = j0_val[idx];
      }
      const double mj = *std::max_element(jp.begin(), jp.end());
      const double mj0 = *std::max_element(j0p.begin(), j0p.end());
      for (std::size_t pol = 0; pol < n; ++pol) {
        const bool a = jp[pol] >= mj - kTie;
        const bool b = j0p[pol] >= mj0 - kTie;
        report.argmax_j += a ? 1 : 0;
        report.argmax_j0 += b ? 1 : 0;
        report.sets_equal = report.sets_equal && a == b;
      }
    } else {
      const double mj = *std::max_element(j_val.begin(), j_val.end());
      const double mj0 = *std::max_element(j0_val.begin(), j0_val.end());
      const auto per_sequence = static_cast<std::size_t>(
          std::pow(static_cast<double>(env.vocab), static_cast<double>(states) - env.horizon));
      for (std::size_t i = 0; i < env.sequence_count(); ++i) {
        const bool a = j_val[i] >= mj - kTie;
        const bool b = j0_val[i] >= mj0 - kTie;
        report.argmax_j += a ? per_sequence : 0;
        report.argmax_j0 += b ? per_sequence : 0;
        report.sets_equal = report.sets_equal && a == b;
      }
    }
  }
  report.strict_fraction = checked == 0 ? 1.0 : static_cast<double>(strict) / static_cast<double>(checked);
  return report;
}

}  // namespace molspo::spo::toy
