#include "molspo/surrogate/surrogate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "molspo/chem/rings.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/lm/checkpoint.hpp"
#include "molspo/lm/errors.hpp"
#include "molspo/lm/optim.hpp"

namespace molspo::surrogate {

namespace {

using critics::CriticError;
using critics::CriticErrorKind;

lm::ModelConfig stack_config(const SurrogateConfig& c, int vocab) {
  lm::ModelConfig m;
  m.layers = c.blocks;
  m.heads = c.heads;
  m.dim = c.dim;
  m.context = c.context;
  m.vocab = vocab;
  m.dropout = c.dropout;
  m.init_scale = c.init_scale;
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SurrogateConfig::validate() const {
  if (blocks < 1 || heads < 1 || dim < 1 || hidden < 1 || context < 3) {
    throw CriticError(CriticErrorKind::kBadSpec, "surrogate sizes must be positive");
  }
  if (dim % heads != 0) {
    throw CriticError(CriticErrorKind::kBadSpec, "surrogate dim not divisible by heads");
  }
}

SurrogateModel::SurrogateModel(tokenizer::Vocabulary vocab, const SurrogateConfig& config,
                               std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  Rng init(seed);
  stack_ = lm::TransformerStack(stack_config(config_, vocab_.size()), false, params_, init);
  w1_ = lm::add_parameter(params_, "head.w1", config_.dim, config_.hidden,
                          1.0 / std::sqrt(static_cast<double>(config_.dim)), init);
  b1_ = lm::add_parameter(params_, "head.b1", 1, config_.hidden, 0.0, init);
  // zero output layer: an untrained model predicts the target mean
  w2_ = lm::add_parameter(params_, "head.w2", config_.hidden, 1, 0.0, init);
  b2_ = lm::add_parameter(params_, "head.b2", 1, 1, 0.0, init);
}

std::vector<int> SurrogateModel::encode(const chem::Molecule& m) const {
  const std::string canonical = chem::write_smiles(m, chem::canonical_ranks(m));
  std::vector<int> ids{tokenizer::kBos};
  try {
    const auto body = vocab_.encode(canonical);
    ids.insert(ids.end(), body.begin(), body.end());
  } catch (const tokenizer::TokenizerError& e) {
    throw CriticError(CriticErrorKind::kTokenizationFailure, e.what());
  }
  ids.push_back(tokenizer::kEos);
  if (static_cast<int>(ids.size()) > config_.context) {
    throw CriticError(CriticErrorKind::kTokenizationFailure,
                      "molecule needs " + std::to_string(ids.size()) + " tokens, context is " +
                          std::to_string(config_.context));
  }
  return ids;
}

std::vector<int> SurrogateModel::encode(std::string_view smiles) const {
  chem::Molecule m;
  try {
    m = chem::parse_smiles(smiles);
  } catch (const chem::SmilesError& e) {
    throw CriticError(CriticErrorKind::kTokenizationFailure, e.what());
  }
  return encode(m);
}

lm::Var SurrogateModel::forward(lm::Tape& t, std::span<const int> ids, Rng* dropout_rng) {
  const lm::Var h = stack_.forward(t, params_, ids, dropout_rng);
  const lm::Var pooled = lm::mean_rows(t, h);
  const lm::Var z = lm::gelu(
      t, lm::add_row(t, lm::matmul(t, pooled, t.parameter(params_[w1_])), t.parameter(params_[b1_])));
  return lm::add_row(t, lm::matmul(t, z, t.parameter(params_[w2_])), t.parameter(params_[b2_]));
}

double SurrogateModel::predict_ids(std::span<const int> ids) const {
  // forward only reads parameters when no backward pass follows
  lm::Tape t;
  auto& self = const_cast<SurrogateModel&>(*this);
  const lm::Var out = self.forward(t, ids, nullptr);
  return mean_ + scale_ * t.value(out)(0, 0);
}

double SurrogateModel::predict(std::string_view smiles) const { return predict_ids(encode(smiles)); }

double SurrogateModel::predict(const chem::Molecule& m) const { return predict_ids(encode(m)); }

void SurrogateModel::set_target_scaling(double mean, double scale) {
  mean_ = mean;
  scale_ = scale > 0.0 ? scale : 1.0;
}

void SurrogateModel::save(const std::filesystem::path& path) const {
  lm::Checkpoint ckpt;
  ckpt.kind = "surrogate";
  ckpt.config = {{"blocks", std::to_string(config_.blocks)},
                 {"heads", std::to_string(config_.heads)},
                 {"dim", std::to_string(config_.dim)},
                 {"context", std::to_string(config_.context)},
                 {"hidden", std::to_string(config_.hidden)},
                 {"dropout", fmt(config_.dropout)},
                 {"init_scale", fmt(config_.init_scale)},
                 {"target_mean", fmt(mean_)},
                 {"target_scale", fmt(scale_)}};
  ckpt.vocabulary = vocab_.serialize();
  ckpt.tensors = params_;
  lm::save_checkpoint(path, ckpt);
}

SurrogateModel SurrogateModel::load(const std::filesystem::path& path) {
  const lm::Checkpoint ckpt = lm::load_checkpoint(path);
  if (ckpt.kind != "surrogate") {
    throw lm::LmError(lm::LmErrorKind::kBadCheckpoint, "expected a surrogate checkpoint");
  }
  SurrogateConfig c;
  double mean = 0.0;
  double scale = 1.0;
  try {
    c.blocks = std::stoi(ckpt.config.at("blocks"));
    c.heads = std::stoi(ckpt.config.at("heads"));
    c.dim = std::stoi(ckpt.config.at("dim"));
    c.context = std::stoi(ckpt.config.at("context"));
    c.hidden = std::stoi(ckpt.config.at("hidden"));
    c.dropout = std::stod(ckpt.config.at("dropout"));
    c.init_scale = std::stod(ckpt.config.at("init_scale"));
    mean = std::stod(ckpt.config.at("target_mean"));
    scale = std::stod(ckpt.config.at("target_scale"));
  } catch (const std::exception& e) {
    throw lm::LmError(lm::LmErrorKind::kBadCheckpoint, std::string("surrogate config: ") + e.what());
  }
  SurrogateModel model(tokenizer::Vocabulary::parse(ckpt.vocabulary), c, 0);
  lm::assign_parameters(model.params_, ckpt.tensors);
  model.set_target_scaling(mean, scale);
  return model;
}

double r_squared(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) /
                      static_cast<double>(truth.size());
  double sst = 0.0;
  double sse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sst += (truth[i] - mean) * (truth[i] - mean);
    sse += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
  }
  if (sst <= 1e-12 * static_cast<double>(truth.size())) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return 1.0 - sse / sst;
}

TrainedSurrogate train_surrogate(std::span<const corpus::ScoredMolecule> rows,
                                 const tokenizer::Vocabulary& vocab,
                                 const SurrogateConfig& config,
                                 const SurrogateTrainOptions& options) {
  if (rows.size() < kMinSurrogateRows) {
    throw CriticError(CriticErrorKind::kInsufficientData,
                      std::to_string(rows.size()) + " rows, need " +
                          std::to_string(kMinSurrogateRows));
  }
  const auto started = std::chrono::steady_clock::now();
  SurrogateModel model(vocab, config, derive_seed(options.seed, 0));

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(options.seed, 1));
  split_rng.shuffle(order.begin(), order.end());
  const auto n_valid = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.valid_fraction * static_cast<double>(rows.size()))));

  struct Example {
    std::vector<int> ids;
    double y;
  };
  std::vector<Example> train;
  std::vector<Example> valid;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = rows[order[i]];
    Example e{model.encode(r.smiles), r.docking_score};
    (i < n_valid ? valid : train).push_back(std::move(e));
  }

  double mean = 0.0;
  for (const auto& e : train) mean += e.y;
  mean /= static_cast<double>(train.size());
  double var = 0.0;
  for (const auto& e : train) var += (e.y - mean) * (e.y - mean);
  const double sd = std::sqrt(var / static_cast<double>(train.size()));
  model.set_target_scaling(mean, sd > 1e-9 ? sd : 1.0);

  SurrogateReport report;
  report.n_train = train.size();
  report.n_valid = valid.size();
  const auto evaluate = [&] {
    std::vector<double> truth, pred;
    for (const auto& e : valid) {
      truth.push_back(e.y);
      pred.push_back(model.predict_ids(e.ids));
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      sse += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    }
    report.final_rmse = std::sqrt(sse / static_cast<double>(truth.size()));
    return r_squared(truth, pred);
  };

  lm::Adam adam(lm::AdamConfig{options.lr});
  std::vector<std::size_t> idx(train.size());
  const double inv_scale = 1.0 / model.target_scale();
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(options.seed, static_cast<std::uint64_t>(2 * epoch + 2)));
    Rng dropout_rng(derive_seed(options.seed, static_cast<std::uint64_t>(2 * epoch + 3)));
    shuffle_rng.shuffle(idx.begin(), idx.end());
    double sse = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(options.batch)) {
      const std::size_t end = std::min(idx.size(), start + static_cast<std::size_t>(options.batch));
      for (auto& p : model.parameters()) p.zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        const Example& e = train[idx[i]];
        lm::Tape t;
        const lm::Var out = model.forward(t, e.ids, &dropout_rng);
        const lm::Matrix target = lm::Matrix::Constant(1, 1, (e.y - mean) * inv_scale);
        const lm::Var loss = lm::squared_error(t, out, target);
        sse += t.value(loss)(0, 0) * model.target_scale() * model.target_scale();
        t.backward(loss, 1.0 / static_cast<double>(end - start));
      }
      lm::clip_grad_norm(model.parameters(), options.clip_norm);
      adam.step(model.parameters());
    }
    report.train_mse.push_back(sse / static_cast<double>(train.size()));
    report.valid_r2.push_back(evaluate());
    if (options.on_epoch) {
      options.on_epoch(epoch, report.train_mse.back(), report.valid_r2.back());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (options.time_budget_seconds > 0.0 && elapsed > options.time_budget_seconds) {
      break;
    }
  }
  for (auto& p : model.parameters()) p.zero_grad();
  report.final_r2 = report.valid_r2.empty() ? evaluate() : report.valid_r2.back();
  return TrainedSurrogate{std::move(model), std::move(report)};
}

double AffineTarget::exact(const chem::Molecule& m) const {
  int heavy = 0;
  for (const auto& a : m.atoms()) {
    heavy += a.element != 1 ? 1 : 0;
  }
  const auto rings = static_cast<double>(chem::sssr(m).size());
  return intercept + per_heavy_atom * heavy + per_ring * rings;
}

double AffineTarget::sample(const chem::Molecule& m, Rng& rng) const {
  return exact(m) + noise * rng.normal();
}

}  // namespace molspo::surrogate
