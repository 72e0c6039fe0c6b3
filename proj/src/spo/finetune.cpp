#include "molspo/spo/finetune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "molspo/chem/smiles.hpp"
#include "molspo/lm/autodiff.hpp"
#include "molspo/lm/errors.hpp"
#include "molspo/lm/training.hpp"

namespace molspo::spo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

}  // namespace

void SpoConfig::validate() const {
  if (epochs < 0 || batch < 1 || !(lr > 0.0) || partial_samples < 1) {
    throw std::invalid_argument("spo config: epochs >= 0, batch >= 1, lr > 0, partial_samples >= 1");
  }
  if (!(beta_sim > 0.0 && beta_sim < 1.0)) {
    throw std::invalid_argument("spo config: beta_sim must be in (0, 1)");
  }
  decode.validate();
}

SpoScorer::SpoScorer(critics::CriticSuite& suite, const tokenizer::Vocabulary& vocab,
                     critics::RewardWeights weights)
    : suite_(suite), vocab_(vocab), weights_(weights) { }

std::optional<chem::Molecule> SpoScorer::molecule(std::span<const int> tokens) const {
  for (const int t : tokens) {
    if (t < tokenizer::kSpecialCount || t >= vocab_.size()) {
      return std::nullopt;
    }
  }
  try {
    chem::Molecule m = chem::parse_smiles(vocab_.decode(tokens));
    if (m.empty()) {
      return std::nullopt;
    }
    return m;
  } catch (const chem::SmilesError&) {
    return std::nullopt;
  }
}

critics::RewardBreakdown SpoScorer::breakdown(const chem::Molecule& x, const chem::Molecule& y) {
  return suite_.composite_reward(x, y, weights_);
}

double SpoScorer::reward_x(const chem::Molecule& x) { return breakdown(x, x).composite; }

SequenceReward SpoScorer::reward_fn(const chem::Molecule& x) {
  return [this, x](std::span<const int> tokens) -> std::optional<double> {
    const auto m = molecule(tokens);
    if (!m) {
      return std::nullopt;
    }
    return breakdown(x, *m).composite;
  };
}

GenerationRecord make_record(const lm::PolicyModel& policy, const lm::PolicyModel& rollout,
                             SpoScorer& scorer, const std::string& x_smiles,
                             const SpoConfig& config, std::uint64_t seed) {
  GenerationRecord r;
  r.x_smiles = x_smiles;
  const chem::Molecule x = chem::parse_smiles(x_smiles);
  r.x_ids = scorer.vocab().encode(chem::write_smiles(x));
  const auto prompt = tokenizer::source_prompt(r.x_ids);
  const int room = policy.config().context - static_cast<int>(prompt.size()) - 1;
  if (room < 1) {
    throw lm::LmError(lm::LmErrorKind::kContextOverflow, "original too long: " + x_smiles);
  }
  decode::DecodeParams params = config.decode;
  params.max_length = std::min(params.max_length, room);

  decode::PolicyStepModel step(policy);
  Rng gen_rng(derive_seed(seed, 0));
  const decode::Generation y = decode::sample_sequence(step, prompt, params, gen_rng);
  r.y_ids = y.tokens;
  r.complete = y.complete;
  r.reward_x = scorer.reward_x(x);

  std::optional<chem::Molecule> ym;
  if (y.complete) {
    ym = scorer.molecule(y.tokens);
  }
  r.valid = ym.has_value();
  std::optional<double> reward_y;
  if (ym) {
    r.breakdown = scorer.breakdown(x, *ym);
    reward_y = r.breakdown->composite;
    r.y_smiles = chem::write_smiles(*ym);
  } else {
    bool printable = true;
    for (const int t : y.tokens) {
      printable = printable && t >= tokenizer::kSpecialCount && t < scorer.vocab().size();
    }
    r.y_smiles = printable ? scorer.vocab().decode(y.tokens) : std::string();
  }
  r.full = full_advantage(reward_y, r.reward_x, config.invalid_mode);
  if (!r.valid || !config.use_partial) {
    r.r_ap = r.full;
    return r;
  }

  decode::PolicyStepModel roll(rollout);
  const SequenceReward reward = scorer.reward_fn(x);
  Rng u_rng(derive_seed(seed, 1));
  for (int m = 0; m < config.partial_samples; ++m) {
    PartialDetail detail;
    const double u = u_rng.uniform_open();
    r.partials.push_back(partial_advantage(roll, prompt, r.x_ids, r.y_ids, u, config.decode.n,
                                           reward, params, config.invalid_mode,
                                           derive_seed(seed, 10 + static_cast<std::uint64_t>(m)),
                                           &detail));
    r.j_used.push_back(detail.j_y);
  }
  r.r_ap = combine_advantage(r.partials, r.full);
  return r;
}

tokenizer::SerializedPair record_sequence(const GenerationRecord& r) {
  tokenizer::SerializedPair s = tokenizer::serialize_pair(r.x_ids, r.y_ids);
  if (!r.complete) {
    s.ids.pop_back();
    s.target_end = s.ids.size();
  }
  return s;
}

StepResult gradient_step(lm::PolicyModel& model, lm::Adam& adam,
                         std::span<const GenerationRecord> records, double clip_norm) {
  model.zero_grad();
  StepResult result;
  if (records.empty()) {
    return result;
  }
  const double inv = 1.0 / static_cast<double>(records.size());
  bool any = false;
  for (const auto& r : records) {
    if (r.r_ap == 0.0) {
      continue;
    }
    const auto seq = record_sequence(r);
    if (seq.target_end <= seq.target_begin) {
      continue;
    }
    any = true;
    lm::Tape t;
    const lm::Var nll = lm::nll(t, model, seq);
    // minimizing R * NLL ascends R * log pi
    t.backward(nll, r.r_ap * inv);
  }
  if (!any) {
    return result;
  }
  result.grad_norm = lm::clip_grad_norm(model.parameters(), clip_norm);
  adam.step(model.parameters());
  result.applied = true;
  return result;
}

void write_metrics_header(std::ostream& out) {
  out << "epoch,records,mean_rap,mean_full,mean_partial,validity,avg_norm_reward,avg_tanimoto";
  for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
    out << ",mean_" << critics::to_string(static_cast<critics::Critic>(c));
  }
  out << "\n";
}

void write_metrics_row(std::ostream& out, const EpochMetrics& m) {
  out << m.epoch << "," << m.records << ",";
  put(out, m.mean_rap);
  out << ",";
  put(out, m.mean_full);
  out << ",";
  put(out, m.mean_partial);
  out << ",";
  put(out, m.validity);
  out << ",";
  put(out, m.avg_norm_reward);
  out << ",";
  put(out, m.avg_tanimoto);
  for (const double v : m.critic_means) {
    out << ",";
    put(out, v);
  }
  out << "\n";
}

int best_epoch(std::span<const EpochMetrics> history) {
  int best = 0;
  double value = -std::numeric_limits<double>::infinity();
  for (const auto& m : history) {
    if (!std::isnan(m.avg_norm_reward) && m.avg_norm_reward > value) {
      value = m.avg_norm_reward;
      best = m.epoch;
    }
  }
  return best;
}

namespace {

EpochMetrics summarize(int epoch, std::span<const GenerationRecord> records) {
  EpochMetrics m;
  m.epoch = epoch;
  m.records = records.size();
  std::size_t valid = 0;
  std::size_t with_partial = 0;
  m.avg_norm_reward = 0;
  for (const auto& r : records) {
    m.mean_rap += r.r_ap;
    m.mean_full += r.full;
    if (!r.partials.empty()) {
      m.mean_partial += std::accumulate(r.partials.begin(), r.partials.end(), 0.0) /
                        static_cast<double>(r.partials.size());
      ++with_partial;
    }
    if (r.breakdown) {
      ++valid;
      m.avg_norm_reward += r.breakdown->composite;
      m.avg_tanimoto += r.breakdown->tanimoto_raw;
      for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
        m.critic_means[c] += r.breakdown->raw[c];
      }
    }
  }
  const auto n = static_cast<double>(std::max<std::size_t>(records.size(), 1));
  m.mean_rap /= n;
  m.mean_full /= n;
  m.mean_partial = with_partial ? m.mean_partial / static_cast<double>(with_partial) : 0.0;
  m.validity = static_cast<double>(valid) / n;
  if (valid == 0) {
    m.avg_norm_reward = kNaN;
    m.avg_tanimoto = kNaN;
    m.critic_means.fill(kNaN);
  } else {
    const auto v = static_cast<double>(valid);
    m.avg_norm_reward /= v;
    m.avg_tanimoto /= v;
    for (double& c : m.critic_means) {
      c /= v;
    }
  }
  return m;
}

}  // namespace

FinetuneResult finetune(lm::PolicyModel& model, const tokenizer::Vocabulary& vocab,
                        const corpus::FinetuneBuffer& buffer, critics::CriticSuite& suite,
                        const SpoConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  SpoScorer scorer(suite, vocab, critics::RewardWeights::from_beta(config.beta_sim));
  lm::Adam adam(lm::AdamConfig{config.lr});
  FinetuneResult result;
  result.best_parameters = model.parameters();
  double best_value = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(buffer.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(config.seed, static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng order_rng(derive_seed(epoch_seed, 0));
    order_rng.shuffle(order.begin(), order.end());
    std::optional<lm::PolicyModel> frozen;
    if (config.frozen_rollout) {
      frozen.emplace(model);
    }

    std::vector<GenerationRecord> epoch_records;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
      std::vector<GenerationRecord> batch;
      for (std::size_t i = start; i < end; ++i) {
        const lm::PolicyModel& rollout = frozen ? *frozen : model;
        batch.push_back(make_record(model, rollout, scorer, buffer.molecules()[order[i]].smiles,
                                    config, derive_seed(epoch_seed, 1 + i)));
      }
      gradient_step(model, adam, batch, config.clip_norm);
      std::move(batch.begin(), batch.end(), std::back_inserter(epoch_records));
    }
    const EpochMetrics metrics = summarize(epoch, epoch_records);
    if (!std::isnan(metrics.avg_norm_reward) && metrics.avg_norm_reward > best_value) {
      best_value = metrics.avg_norm_reward;
      result.best_epoch = epoch;
      result.best_parameters = model.parameters();
    }
    result.history.push_back(metrics);
    if (on_epoch) {
      on_epoch(metrics, model, epoch_records);
    }
  }
  model.zero_grad();
  return result;
}

}  // namespace molspo::spo
