#include "molspo/lm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "molspo/lm/errors.hpp"

namespace molspo::lm {

namespace {

constexpr const char* kHeader = "MOLSPO-CKPT 1";

void put_double(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

double get_double(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw LmError(LmErrorKind::kBadCheckpoint, "truncated tensor data");
  }
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | bytes[i];
  }
  return std::bit_cast<double>(bits);
}

std::string expect_line(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw LmError(LmErrorKind::kBadCheckpoint, "missing " + what);
  }
  return line;
}

std::size_t keyed_count(std::istream& in, const std::string& key) {
  std::istringstream fields(expect_line(in, key));
  std::string k;
  std::size_t n = 0;
  if (!(fields >> k >> n) || k != key) {
    throw LmError(LmErrorKind::kBadCheckpoint, "expected '" + key + " <n>'");
  }
  return n;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw LmError(LmErrorKind::kBadCheckpoint, "cannot write " + path.string());
  }
  out << kHeader << "\n";
  out << "kind " << ckpt.kind << "\n";
  out << "config " << ckpt.config.size() << "\n";
  for (const auto& [k, v] : ckpt.config) {
    out << k << " " << v << "\n";
  }
  out << "vocabulary " << ckpt.vocabulary.size() << "\n" << ckpt.vocabulary;
  out << "tensors " << ckpt.tensors.size() << "\n";
  for (const auto& p : ckpt.tensors) {
    out << p.name << " " << p.value.rows() << " " << p.value.cols() << "\n";
  }
  for (const auto& p : ckpt.tensors) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      put_double(out, p.value.data()[i]);
    }
  }
  if (!out) {
    throw LmError(LmErrorKind::kBadCheckpoint, "write failed for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw LmError(LmErrorKind::kCheckpointNotFound, "checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in || expect_line(in, "header") != kHeader) {
    throw LmError(LmErrorKind::kBadCheckpoint, "bad header in " + path.string());
  }
  Checkpoint ckpt;
  {
    const std::string kind = expect_line(in, "kind");
    if (kind.rfind("kind ", 0) != 0) {
      throw LmError(LmErrorKind::kBadCheckpoint, "missing kind");
    }
    ckpt.kind = kind.substr(5);
  }
  const std::size_t n_config = keyed_count(in, "config");
  for (std::size_t i = 0; i < n_config; ++i) {
    const std::string line = expect_line(in, "config entry");
    const auto sp = line.find(' ');
    if (sp == std::string::npos) {
      throw LmError(LmErrorKind::kBadCheckpoint, "bad config entry '" + line + "'");
    }
    ckpt.config[line.substr(0, sp)] = line.substr(sp + 1);
  }
  const std::size_t vocab_bytes = keyed_count(in, "vocabulary");
  ckpt.vocabulary.resize(vocab_bytes);
  if (!in.read(ckpt.vocabulary.data(), static_cast<std::streamsize>(vocab_bytes))) {
    throw LmError(LmErrorKind::kBadCheckpoint, "truncated vocabulary");
  }
  const std::size_t n_tensors = keyed_count(in, "tensors");
  std::vector<std::pair<std::string, std::pair<long, long>>> manifest;
  for (std::size_t i = 0; i < n_tensors; ++i) {
    std::istringstream fields(expect_line(in, "tensor manifest"));
    std::string name;
    long rows = 0, cols = 0;
    if (!(fields >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw LmError(LmErrorKind::kBadCheckpoint, "bad tensor manifest entry");
    }
    manifest.push_back({name, {rows, cols}});
  }
  for (const auto& [name, shape] : manifest) {
    Matrix m(shape.first, shape.second);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = get_double(in);
    }
    ckpt.tensors.emplace_back(name, std::move(m));
  }
  return ckpt;
}

void assign_parameters(std::vector<Parameter>& dst, const std::vector<Parameter>& src) {
  if (dst.size() != src.size()) {
    throw LmError(LmErrorKind::kBadCheckpoint,
                  "tensor count " + std::to_string(src.size()) + ", model expects " +
                      std::to_string(dst.size()));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i].name != src[i].name || dst[i].value.rows() != src[i].value.rows() ||
        dst[i].value.cols() != src[i].value.cols()) {
      throw LmError(LmErrorKind::kBadCheckpoint, "tensor mismatch at " + src[i].name);
    }
    dst[i].value = src[i].value;
    dst[i].zero_grad();
  }
}

void save_policy(const std::filesystem::path& path, const PolicyModel& model,
                 const tokenizer::Vocabulary& vocab) {
  Checkpoint ckpt;
  ckpt.kind = "policy";
  ckpt.config = model.config().to_map();
  ckpt.vocabulary = vocab.serialize();
  ckpt.tensors = model.parameters();
  save_checkpoint(path, ckpt);
}

LoadedPolicy load_policy(const std::filesystem::path& path) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.kind != "policy") {
    throw LmError(LmErrorKind::kBadCheckpoint, "expected a policy checkpoint, got " + ckpt.kind);
  }
  LoadedPolicy out{tokenizer::Vocabulary::parse(ckpt.vocabulary),
                   PolicyModel(ModelConfig::from_map(ckpt.config), 0)};
  assign_parameters(out.model.parameters(), ckpt.tensors);
  return out;
}

}  // namespace molspo::lm
