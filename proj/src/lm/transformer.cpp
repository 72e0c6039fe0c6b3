#include "molspo/lm/transformer.hpp"

#include <cmath>

#include "molspo/lm/errors.hpp"

namespace molspo::lm {

namespace {

int to_int(const std::map<std::string, std::string>& kv, const std::string& key, int fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stoi(it->second);
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ModelConfig::validate() const {
  const auto fail = [](const std::string& why) { throw LmError(LmErrorKind::kBadConfig, why); };
  if (layers < 1 || heads < 1 || dim < 1 || context < 2 || vocab < 1) {
    fail("sizes must be positive");
  }
  if (dim % heads != 0) {
    fail("dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    fail("dropout must be in [0, 1)");
  }
  if (!(init_scale >= 0.0)) {
    fail("init_scale must be non-negative");
  }
}

std::map<std::string, std::string> ModelConfig::to_map() const {
  return {{"layers", std::to_string(layers)},   {"heads", std::to_string(heads)},
          {"dim", std::to_string(dim)},         {"context", std::to_string(context)},
          {"vocab", std::to_string(vocab)},     {"dropout", format_double(dropout)},
          {"init_scale", format_double(init_scale)}};
}

ModelConfig ModelConfig::from_map(const std::map<std::string, std::string>& kv) {
  ModelConfig c;
  try {
    c.layers = to_int(kv, "layers", c.layers);
    c.heads = to_int(kv, "heads", c.heads);
    c.dim = to_int(kv, "dim", c.dim);
    c.context = to_int(kv, "context", c.context);
    c.vocab = to_int(kv, "vocab", c.vocab);
    c.dropout = to_double(kv, "dropout", c.dropout);
    c.init_scale = to_double(kv, "init_scale", c.init_scale);
  } catch (const std::logic_error& e) {
    throw LmError(LmErrorKind::kBadConfig, e.what());
  }
  c.validate();
  return c;
}

int add_parameter(std::vector<Parameter>& params, std::string name, int rows, int cols,
                  double stddev, Rng& init) {
  Matrix m(rows, cols);
  if (stddev < 0.0) {
    m.setOnes();
  } else if (stddev == 0.0) {
    m.setZero();
  } else {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = init.normal() * stddev;
    }
  }
  params.emplace_back(std::move(name), std::move(m));
  return static_cast<int>(params.size()) - 1;
}

TransformerStack::TransformerStack(const ModelConfig& config, bool causal,
                                   std::vector<Parameter>& params, Rng& init)
    : config_(config), causal_(causal) {
  config_.validate();
  const int d = config.dim;
  const double s = config.init_scale;
  // residual projections shrink with depth
  const double s_res = s / std::sqrt(2.0 * config.layers);
  tok_ = add_parameter(params, "tok_emb", config.vocab, d, s, init);
  pos_ = add_parameter(params, "pos_emb", config.context, d, s, init);
  for (int l = 0; l < config.layers; ++l) {
    const std::string p = "h" + std::to_string(l) + ".";
    Block b{};
    b.ln1_g = add_parameter(params, p + "ln1.g", 1, d, -1.0, init);
    b.ln1_b = add_parameter(params, p + "ln1.b", 1, d, 0.0, init);
    b.w_qkv = add_parameter(params, p + "attn.w_qkv", d, 3 * d, s, init);
    b.b_qkv = add_parameter(params, p + "attn.b_qkv", 1, 3 * d, 0.0, init);
    b.w_out = add_parameter(params, p + "attn.w_out", d, d, s_res, init);
    b.b_out = add_parameter(params, p + "attn.b_out", 1, d, 0.0, init);
    b.ln2_g = add_parameter(params, p + "ln2.g", 1, d, -1.0, init);
    b.ln2_b = add_parameter(params, p + "ln2.b", 1, d, 0.0, init);
    b.w_fc = add_parameter(params, p + "mlp.w_fc", d, 4 * d, s, init);
    b.b_fc = add_parameter(params, p + "mlp.b_fc", 1, 4 * d, 0.0, init);
    b.w_proj = add_parameter(params, p + "mlp.w_proj", 4 * d, d, s_res, init);
    b.b_proj = add_parameter(params, p + "mlp.b_proj", 1, d, 0.0, init);
    blocks_.push_back(b);
  }
  lnf_g_ = add_parameter(params, "ln_f.g", 1, d, -1.0, init);
  lnf_b_ = add_parameter(params, "ln_f.b", 1, d, 0.0, init);
}

Var TransformerStack::forward(Tape& t, std::vector<Parameter>& params,
                              std::span<const int> ids, Rng* dropout_rng) const {
  const auto n = static_cast<Eigen::Index>(ids.size());
  if (n == 0) {
    throw LmError(LmErrorKind::kBadConfig, "empty input sequence");
  }
  if (n > config_.context) {
    throw LmError(LmErrorKind::kContextOverflow,
                  std::to_string(n) + " tokens, context " + std::to_string(config_.context));
  }
  for (const int id : ids) {
    if (id < 0 || id >= config_.vocab) {
      throw LmError(LmErrorKind::kBadConfig, "token id " + std::to_string(id) + " out of range");
    }
  }
  const auto P = [&](int idx) { return t.parameter(params[idx]); };
  const auto drop = [&](Var v) {
    return dropout_rng != nullptr ? dropout(t, v, config_.dropout, *dropout_rng) : v;
  };
  Var x = add(t, gather_rows(t, P(tok_), ids), leading_rows(t, P(pos_), n));
  x = drop(x);
  for (const Block& b : blocks_) {
    Var h = layer_norm(t, x, P(b.ln1_g), P(b.ln1_b));
    Var qkv = add_row(t, matmul(t, h, P(b.w_qkv)), P(b.b_qkv));
    Var a = attention(t, qkv, config_.heads, causal_);
    a = add_row(t, matmul(t, a, P(b.w_out)), P(b.b_out));
    x = add(t, x, drop(a));
    h = layer_norm(t, x, P(b.ln2_g), P(b.ln2_b));
    Var m = gelu(t, add_row(t, matmul(t, h, P(b.w_fc)), P(b.b_fc)));
    m = add_row(t, matmul(t, m, P(b.w_proj)), P(b.b_proj));
    x = add(t, x, drop(m));
  }
  return layer_norm(t, x, P(lnf_g_), P(lnf_b_));
}

PolicyModel::PolicyModel(const ModelConfig& config, std::uint64_t seed) {
  Rng init(seed);
  stack_ = TransformerStack(config, true, params_, init);
  head_ = add_parameter(params_, "head", config.dim, config.vocab, config.init_scale, init);
}

std::size_t PolicyModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    n += static_cast<std::size_t>(p.value.size());
  }
  return n;
}

Var PolicyModel::forward(Tape& t, std::span<const int> ids, Rng* dropout_rng) {
  const Var h = stack_.forward(t, params_, ids, dropout_rng);
  return matmul(t, h, t.parameter(params_[head_]));
}

Matrix PolicyModel::logits(std::span<const int> ids) const {
  // The tape only reads parameters here; no backward is run.
  Tape t;
  auto& params = const_cast<std::vector<Parameter>&>(params_);
  const Var h = stack_.forward(t, params, ids, nullptr);
  return t.value(h) * params_[head_].value;
}

void PolicyModel::zero_grad() {
  for (auto& p : params_) {
    p.zero_grad();
  }
}

PolicyModel::Session::Session(const PolicyModel& model) : model_(model) {
  const ModelConfig& c = model.config();
  keys_.assign(static_cast<std::size_t>(c.layers), Matrix(c.context, c.dim));
  values_.assign(static_cast<std::size_t>(c.layers), Matrix(c.context, c.dim));
}

RowVector PolicyModel::Session::step(int token) {
  const ModelConfig& c = model_.config();
  if (length_ >= c.context) {
    throw LmError(LmErrorKind::kContextOverflow,
                  "session full at " + std::to_string(c.context) + " tokens");
  }
  if (token < 0 || token >= c.vocab) {
    throw LmError(LmErrorKind::kBadConfig, "token id " + std::to_string(token) + " out of range");
  }
  const auto& P = model_.params_;
  const TransformerStack& st = model_.stack_;
  const int d = c.dim;
  const int dh = d / c.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const int pos = length_;

  Matrix x = P[st.token_embedding()].value.row(token) + P[st.position_embedding()].value.row(pos);
  Matrix h;
  for (std::size_t l = 0; l < st.blocks().size(); ++l) {
    const auto& b = st.blocks()[l];
    layer_norm_rows(x, P[b.ln1_g].value, P[b.ln1_b].value, 1e-5, h);
    const Matrix qkv = h * P[b.w_qkv].value + P[b.b_qkv].value;
    keys_[l].row(pos) = qkv.middleCols(d, d);
    values_[l].row(pos) = qkv.middleCols(2 * d, d);
    Matrix att(1, d);
    for (int hd = 0; hd < c.heads; ++hd) {
      const auto q = qkv.middleCols(hd * dh, dh);
      const auto k = keys_[l].block(0, hd * dh, pos + 1, dh);
      const auto v = values_[l].block(0, hd * dh, pos + 1, dh);
      RowVector s = (q * k.transpose()) * scale;
      const double mx = s.maxCoeff();
      s = (s.array() - mx).exp();
      s /= s.sum();
      att.middleCols(hd * dh, dh) = s * v;
    }
    x += att * P[b.w_out].value + P[b.b_out].value;
    layer_norm_rows(x, P[b.ln2_g].value, P[b.ln2_b].value, 1e-5, h);
    Matrix m = (h * P[b.w_fc].value + P[b.b_fc].value)
                   .unaryExpr([](double v) { return gelu_value(v); });
    x += m * P[b.w_proj].value + P[b.b_proj].value;
  }
  layer_norm_rows(x, P[st.final_gamma()].value, P[st.final_beta()].value, 1e-5, h);
  ++length_;
  return h * P[model_.head_].value;
}

RowVector PolicyModel::Session::feed(std::span<const int> ids) {
  RowVector out;
  for (const int id : ids) {
    out = step(id);
  }
  return out;
}

}  // namespace molspo::lm
