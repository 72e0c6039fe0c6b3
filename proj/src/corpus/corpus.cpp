#include "molspo/corpus/corpus.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "molspo/chem/scaffold.hpp"
#include "molspo/chem/smiles.hpp"

namespace molspo::corpus {

namespace {

const char* describe(CorpusErrorKind kind) {
  switch (kind) {
  case CorpusErrorKind::kTooFewMolecules:
    return "TooFewMolecules";
  case CorpusErrorKind::kInsufficientRows:
    return "InsufficientRows";
  case CorpusErrorKind::kBadCsv:
    return "BadCsv";
  case CorpusErrorKind::kBadFile:
    return "BadFile";
  }
  return "Unknown";
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError(CorpusErrorKind::kBadFile, "cannot read " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw CorpusError(CorpusErrorKind::kBadFile, "cannot write " + path.string());
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

double parse_double(const std::string& field, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || !std::isfinite(v)) {
    throw CorpusError(CorpusErrorKind::kBadCsv,
                      "line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

CorpusError::CorpusError(CorpusErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(describe(kind)) + ": " + detail), kind_(kind) { }

PairFeatures pair_features(std::string_view smiles) {
  const chem::Molecule m = chem::parse_smiles(smiles);
  PairFeatures f;
  f.canonical = chem::write_smiles(m, chem::canonical_ranks(m));
  f.fingerprint = fp::morgan_fingerprint(m);
  f.scaffold = chem::murcko_scaffold(m).smiles();
  return f;
}

bool pair_eligible(const PairFeatures& x, const PairFeatures& y) {
  if (fp::tanimoto(x.fingerprint, y.fingerprint) > kPairSimilarityThreshold) {
    return true;
  }
  return !x.scaffold.empty() && x.scaffold == y.scaffold;
}

bool pair_eligible(std::string_view x, std::string_view y) {
  return pair_eligible(pair_features(x), pair_features(y));
}

PairCorpus build_pretrain_corpus(std::span<const std::string> molecules,
                                 std::size_t n_pairs, std::uint64_t seed,
                                 double train_fraction) {
  std::vector<PairFeatures> features;
  features.reserve(molecules.size());
  for (const auto& s : molecules) {
    features.push_back(pair_features(s));
  }
  if (features.size() < 2) {
    throw CorpusError(CorpusErrorKind::kTooFewMolecules, "need at least two molecules");
  }

  Rng rng(seed);
  const std::size_t budget = kAttemptsPerPair * n_pairs;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<MoleculePair> accepted;
  PairCorpus corpus;
  while (accepted.size() < n_pairs && corpus.attempts < budget) {
    ++corpus.attempts;
    const auto i = rng.below(features.size());
    auto j = rng.below(features.size() - 1);
    if (j >= i) {
      ++j;
    }
    const PairFeatures& x = features[i];
    const PairFeatures& y = features[j];
    if (x.canonical == y.canonical || !pair_eligible(x, y)) {
      continue;
    }
    if (!seen.emplace(x.canonical, y.canonical).second) {
      continue;
    }
    accepted.push_back({x.canonical, y.canonical,
                        fp::tanimoto(x.fingerprint, y.fingerprint),
                        !x.scaffold.empty() && x.scaffold == y.scaffold});
  }
  corpus.shortfall = n_pairs - accepted.size();

  const auto n_valid = static_cast<std::size_t>(
      std::llround(static_cast<double>(accepted.size()) * (1.0 - train_fraction)));
  const auto split = accepted.begin() + static_cast<std::ptrdiff_t>(accepted.size() - n_valid);
  corpus.train.assign(accepted.begin(), split);
  corpus.valid.assign(split, accepted.end());
  return corpus;
}

void write_pairs(std::ostream& out, std::span<const MoleculePair> pairs) {
  for (const auto& p : pairs) {
    out << p.x << '\t' << p.y << '\t' << std::setprecision(17) << p.tanimoto << '\n';
  }
}

std::vector<MoleculePair> read_pairs(std::istream& in) {
  std::vector<MoleculePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    MoleculePair p;
    std::string sim;
    if (!std::getline(fields, p.x, '\t') || !std::getline(fields, p.y, '\t') ||
        !std::getline(fields, sim)) {
      throw CorpusError(CorpusErrorKind::kBadCsv,
                        "line " + std::to_string(line_no) + ": expected 3 fields");
    }
    p.tanimoto = parse_double(sim, line_no);
    const auto fx = pair_features(p.x);
    const auto fy = pair_features(p.y);
    p.same_scaffold = !fx.scaffold.empty() && fx.scaffold == fy.scaffold;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void save_pairs(const std::filesystem::path& path, std::span<const MoleculePair> pairs) {
  auto out = open_output(path);
  write_pairs(out, pairs);
}

std::vector<MoleculePair> load_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_pairs(in);
}

std::vector<std::string> load_smiles(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    // tolerate a trailing name column
    if (const auto cut = line.find_first_of(" \t"); cut != std::string::npos) {
      line.resize(cut);
    }
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

std::vector<ScoredMolecule> read_scored_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CorpusError(CorpusErrorKind::kBadCsv, "empty file");
  }
  strip_cr(line);
  if (line != "smiles,docking_score") {
    throw CorpusError(CorpusErrorKind::kBadCsv, "expected header smiles,docking_score");
  }
  std::vector<ScoredMolecule> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw CorpusError(CorpusErrorKind::kBadCsv,
                        "line " + std::to_string(line_no) + ": expected 2 fields");
    }
    rows.push_back({line.substr(0, comma), parse_double(line.substr(comma + 1), line_no)});
  }
  return rows;
}

std::vector<ScoredMolecule> load_scored_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_scored_csv(in);
}

void save_scored_csv(const std::filesystem::path& path,
                     std::span<const ScoredMolecule> rows) {
  auto out = open_output(path);
  out << "smiles,docking_score\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.smiles << ',' << r.docking_score << '\n';
  }
}

FinetuneBuffer::FinetuneBuffer(std::vector<ScoredMolecule> molecules)
    : molecules_(std::move(molecules)) {
  if (molecules_.empty()) {
    throw CorpusError(CorpusErrorKind::kInsufficientRows, "empty buffer");
  }
}

const ScoredMolecule& FinetuneBuffer::sample(Rng& rng) const {
  return molecules_[rng.below(molecules_.size())];
}

FinetuneBuffer build_finetune_buffer(std::span<const ScoredMolecule> rows,
                                     std::size_t size, std::uint64_t seed,
                                     double lo, double hi) {
  std::vector<ScoredMolecule> kept;
  for (const auto& r : rows) {
    if (r.docking_score >= lo && r.docking_score <= hi) {
      kept.push_back(r);
    }
  }
  if (size == 0 || kept.size() < size) {
    throw CorpusError(CorpusErrorKind::kInsufficientRows,
                      std::to_string(kept.size()) + " rows in range, " +
                          std::to_string(size) + " requested");
  }
  // partial Fisher-Yates: the first `size` slots are a uniform sample
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const auto j = i + rng.below(kept.size() - i);
    std::swap(kept[i], kept[j]);
  }
  kept.resize(size);
  return FinetuneBuffer(std::move(kept));
}

}  // namespace molspo::corpus
