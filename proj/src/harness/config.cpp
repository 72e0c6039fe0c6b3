#include "molspo/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <type_traits>

#include "molspo/harness/errors.hpp"

namespace molspo::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw HarnessError(HarnessErrorKind::kUsage, "bad value for " + key + ": '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    bad_value(key, value);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// One codec per field type; `read` parses into the field, `show` renders it.
void read(const std::string& k, const std::string& v, int& f) { f = parse_number<int>(k, v); }
void read(const std::string& k, const std::string& v, std::uint64_t& f) {
  f = parse_number<std::uint64_t>(k, v);
}
void read(const std::string& k, const std::string& v, double& f) {
  f = parse_number<double>(k, v);
}
void read(const std::string& k, const std::string& v, bool& f) {
  if (v == "true" || v == "1") {
    f = true;
  } else if (v == "false" || v == "0") {
    f = false;
  } else {
    bad_value(k, v);
  }
}
void read(const std::string&, const std::string& v, std::string& f) { f = v; }
void read(const std::string&, const std::string& v, std::filesystem::path& f) { f = v; }
void read(const std::string& k, const std::string& v, DockingSource& f) {
  if (v == "mock") {
    f = DockingSource::kMock;
  } else if (v == "surrogate") {
    f = DockingSource::kSurrogate;
  } else {
    bad_value(k, v);
  }
}
void read(const std::string& k, const std::string& v, spo::InvalidMode& f) {
  try {
    f = spo::parse_invalid_mode(v);
  } catch (const std::exception&) {
    bad_value(k, v);
  }
}
void read(const std::string& k, const std::string& v, critics::Direction& f) {
  if (v == "maximize") {
    f = critics::Direction::kMaximize;
  } else if (v == "minimize") {
    f = critics::Direction::kMinimize;
  } else {
    bad_value(k, v);
  }
}
void read(const std::string& k, const std::string& v, std::optional<double>& f) {
  if (v == "off") {
    f.reset();
  } else {
    f = parse_number<double>(k, v);
  }
}

std::string show(int f) { return std::to_string(f); }
std::string show(std::uint64_t f) { return std::to_string(f); }
std::string show(double f) { return format_double(f); }
std::string show(bool f) { return f ? "true" : "false"; }
std::string show(const std::string& f) { return f; }
std::string show(const std::filesystem::path& f) { return f.string(); }
std::string show(DockingSource f) { return f == DockingSource::kMock ? "mock" : "surrogate"; }
std::string show(spo::InvalidMode f) { return spo::to_string(f); }
std::string show(critics::Direction f) {
  return f == critics::Direction::kMaximize ? "maximize" : "minimize";
}
std::string show(const std::optional<double>& f) { return f ? format_double(*f) : "off"; }

// Single list of keys shared by parsing and serialization.
template <typename Config, typename Fn>
void fields(Config& c, Fn&& fn) {
  fn("seed", c.seed);
  fn("label", c.label);
  fn("data.molecules", c.molecules);

  fn("corpus.pairs", c.corpus_pairs);
  fn("corpus.train_fraction", c.train_fraction);
  fn("corpus.vocab_size", c.vocab_size);

  fn("model.layers", c.model.layers);
  fn("model.heads", c.model.heads);
  fn("model.dim", c.model.dim);
  fn("model.context", c.model.context);
  fn("model.dropout", c.model.dropout);
  fn("model.init_scale", c.model.init_scale);

  fn("pretrain.epochs", c.pretrain_epochs);
  fn("pretrain.batch", c.pretrain_batch);
  fn("pretrain.lr", c.pretrain_lr);
  fn("pretrain.lambda_mix", c.lambda_mix);
  fn("pretrain.clip_norm", c.pretrain_clip);

  fn("surrogate.data", c.surrogate_data);
  fn("surrogate.blocks", c.surrogate.blocks);
  fn("surrogate.heads", c.surrogate.heads);
  fn("surrogate.dim", c.surrogate.dim);
  fn("surrogate.context", c.surrogate.context);
  fn("surrogate.hidden", c.surrogate.hidden);
  fn("surrogate.dropout", c.surrogate.dropout);
  fn("surrogate.epochs", c.surrogate_epochs);
  fn("surrogate.batch", c.surrogate_batch);
  fn("surrogate.lr", c.surrogate_lr);

  fn("buffer.docking", c.docking);
  fn("buffer.from_corpus", c.buffer_from_corpus);
  fn("buffer.size", c.buffer_size);
  fn("buffer.lo", c.buffer_lo);
  fn("buffer.hi", c.buffer_hi);

  fn("spo.epochs", c.spo.epochs);
  fn("spo.batch", c.spo.batch);
  fn("spo.lr", c.spo.lr);
  fn("spo.beta_sim", c.spo.beta_sim);
  fn("spo.invalid_mode", c.spo.invalid_mode);
  fn("spo.partial_samples", c.spo.partial_samples);
  fn("spo.use_partial", c.spo.use_partial);
  fn("spo.frozen_rollout", c.spo.frozen_rollout);
  fn("spo.clip_norm", c.spo.clip_norm);
  fn("spo.save_epoch_checkpoints", c.save_epoch_checkpoints);

  fn("decode.p", c.spo.decode.p);
  fn("decode.k", c.spo.decode.k);
  fn("decode.n", c.spo.decode.n);
  fn("decode.max_length", c.spo.decode.max_length);
  fn("decode.temperature", c.spo.decode.temperature);

  for (auto& spec : c.critics.critics) {
    const std::string prefix = "critic." + std::string(spec.name) + ".";
    fn(prefix + "direction", spec.direction);
    fn(prefix + "lo", spec.lo);
    fn(prefix + "hi", spec.hi);
  }
  fn("critic.similarity.lo", c.critics.similarity.lo);
  fn("critic.similarity.hi", c.critics.similarity.hi);

  fn("eval.similarity_filter", c.similarity_filter);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string body = trim(line);
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw HarnessError(HarnessErrorKind::kUsage,
                         "config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      throw HarnessError(HarnessErrorKind::kUsage,
                         "config line " + std::to_string(number) + ": empty key");
    }
    kv.set(key, trim(std::string_view(body).substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact,
                       "config not found: " + path.string());
  }
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void KeyValueConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) {
    out << k << " = " << v << "\n";
  }
}

PipelineConfig PipelineConfig::smoke() {
  PipelineConfig c;
  c.label = "smoke";
  c.corpus_pairs = 50;
  c.vocab_size = 120;
  c.model.layers = 2;
  c.model.heads = 2;
  c.model.dim = 32;
  c.model.context = 160;
  c.pretrain_epochs = 100;
  c.pretrain_batch = 8;
  c.pretrain_lr = 3e-3;
  c.surrogate.blocks = 2;
  c.surrogate.dim = 32;
  c.surrogate.hidden = 32;
  c.buffer_size = 64;
  c.spo.epochs = 20;
  c.spo.batch = 16;
  c.spo.lr = 3e-4;
  c.spo.invalid_mode = spo::InvalidMode::kMinusRcX;
  c.spo.decode.max_length = 64;
  return c;
}

PipelineConfig PipelineConfig::from(const KeyValueConfig& kv, PipelineConfig base) {
  std::set<std::string> seen;
  fields(base, [&](const std::string& key, auto& field) {
    seen.insert(key);
    if (const auto v = kv.get(key)) {
      read(key, *v, field);
    }
  });
  for (const auto& [k, v] : kv.values()) {
    if (!seen.contains(k)) {
      throw HarnessError(HarnessErrorKind::kUsage, "unknown config key: " + k);
    }
  }
  base.validate();
  return base;
}

KeyValueConfig PipelineConfig::to_kv() const {
  KeyValueConfig kv;
  PipelineConfig copy = *this;
  fields(copy, [&](const std::string& key, auto& field) { kv.set(key, show(field)); });
  return kv;
}

void PipelineConfig::validate() const {
  try {
    if (corpus_pairs < 1 || vocab_size < 1 || pretrain_epochs < 0 || pretrain_batch < 1 ||
        buffer_size < 1 || surrogate_epochs < 0 || surrogate_batch < 1) {
      throw std::invalid_argument("counts must be positive");
    }
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
      throw std::invalid_argument("corpus.train_fraction must be in (0, 1]");
    }
    if (!(lambda_mix > 0.0 && lambda_mix < 1.0)) {
      throw std::invalid_argument("pretrain.lambda_mix must be in (0, 1)");
    }
    if (!(buffer_lo < buffer_hi)) {
      throw std::invalid_argument("buffer.lo must be below buffer.hi");
    }
    model.validate();
    surrogate.validate();
    spo.validate();
    critics.validate();
  } catch (const HarnessError&) {
    throw;
  } catch (const std::exception& e) {
    throw HarnessError(HarnessErrorKind::kUsage, std::string("invalid config: ") + e.what());
  }
}

}  // namespace molspo::harness
