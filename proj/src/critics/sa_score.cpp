#include "molspo/critics/sa_score.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <vector>
#include <set>
#include <sstream>

#include "molspo/chem/rings.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/fp/fingerprint.hpp"

namespace molspo::critics {

namespace {

constexpr const char* kHeader = "MOLSPO-FRAGMENTS 1";
constexpr int kFragmentRadius = 2;
constexpr double kLowScore = -4.0;
constexpr double kHighScore = 2.5;
// Share of all fragment occurrences covered by the "frequent" fragments.
constexpr double kFrequentShare = 0.8;

}  // namespace

FragmentTable FragmentTable::fit(std::span<const chem::Molecule> corpus) {
  if (corpus.empty()) {
    throw CriticError(CriticErrorKind::kEmptyCorpus, "fragment table");
  }
  FragmentTable table;
  for (const chem::Molecule& m : corpus) {
    if (m.empty()) {
      continue;
    }
    for (const auto& env : fp::morgan_environments(m, kFragmentRadius)) {
      ++table.counts_[env.hash];
      ++table.total_;
    }
  }
  if (table.total_ == 0) {
    throw CriticError(CriticErrorKind::kEmptyCorpus, "no fragments");
  }
  return table;
}

std::uint64_t FragmentTable::count(std::uint64_t hash) const {
  const auto it = counts_.find(hash);
  return it == counts_.end() ? 0 : it->second;
}

double FragmentTable::log_frequency(std::uint64_t hash) const {
  const auto c = count(hash);
  return c == 0 ? unseen_log_frequency()
                : std::log(static_cast<double>(c) / static_cast<double>(total_));
}

double FragmentTable::unseen_log_frequency() const {
  return std::log(0.5 / static_cast<double>(total_));
}

double FragmentTable::reference_log_frequency() const {
  std::vector<std::uint64_t> sorted;
  sorted.reserve(counts_.size());
  for (const auto& [hash, count] : counts_) {
    sorted.push_back(count);
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double needed = kFrequentShare * static_cast<double>(total_);
  double covered = 0;
  for (const auto count : sorted) {
    covered += static_cast<double>(count);
    if (covered >= needed) {
      return std::log(static_cast<double>(count) / static_cast<double>(total_));
    }
  }
  return unseen_log_frequency();
}

std::string FragmentTable::serialize() const {
  std::ostringstream out;
  out << kHeader << "\n" << "total " << total_ << "\n";
  for (const auto& [hash, count] : counts_) {
    out << hash << " " << count << "\n";
  }
  return out.str();
}

FragmentTable FragmentTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw CriticError(CriticErrorKind::kBadTable, "missing header");
  }
  FragmentTable table;
  std::string word;
  if (!(in >> word >> table.total_) || word != "total") {
    throw CriticError(CriticErrorKind::kBadTable, "missing total");
  }
  std::uint64_t hash, count, sum = 0;
  while (in >> hash >> count) {
    table.counts_[hash] = count;
    sum += count;
  }
  if (!in.eof() || sum != table.total_ || table.total_ == 0) {
    throw CriticError(CriticErrorKind::kBadTable, "inconsistent counts");
  }
  return table;
}

void FragmentTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << serialize();
  if (!out) {
    throw CriticError(CriticErrorKind::kBadTable, "cannot write " + path.string());
  }
}

FragmentTable FragmentTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CriticError(CriticErrorKind::kTableMissing, path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

SaTerms sa_terms(const chem::Molecule& m, const FragmentTable& table) {
  if (table.empty()) {
    throw CriticError(CriticErrorKind::kTableMissing, "fragment table not fitted");
  }
  SaTerms t{};
  const auto envs = fp::morgan_environments(m, kFragmentRadius);
  std::set<std::uint64_t> distinct;
  double rarity = 0;
  for (const auto& env : envs) {
    rarity += -table.log_frequency(env.hash);
    distinct.insert(env.hash);
  }
  // Fragments at least as common as the reference score positive.
  const double mean_log_ratio =
      envs.empty() ? kLowScore
                   : (-rarity / envs.size() - table.reference_log_frequency()) /
                         std::log(10.0);
  t.fragment_score = std::clamp(mean_log_ratio, kLowScore, kHighScore);

  const double n = m.heavy_atom_count();
  const auto rings = chem::sssr(m);
  const int macrocycles = static_cast<int>(std::count_if(
      rings.begin(), rings.end(), [](const chem::Ring& r) { return r.size() > 8; }));
  t.size_penalty = std::pow(n, 1.005) - n;
  t.stereo_penalty = 0;
  t.spiro_penalty = std::log10(chem::spiro_atom_count(rings) + 1.0);
  t.bridge_penalty = std::log10(chem::bridgehead_atom_count(m, rings) + 1.0);
  t.macrocycle_penalty = macrocycles > 0 ? std::log10(2.0) : 0.0;
  t.symmetry_bonus =
      !distinct.empty() && n > static_cast<double>(distinct.size())
          ? 0.5 * std::log(n / static_cast<double>(distinct.size()))
          : 0.0;

  const double raw = t.fragment_score - t.size_penalty - t.stereo_penalty -
                     t.spiro_penalty - t.bridge_penalty - t.macrocycle_penalty +
                     t.symmetry_bonus;
  double s = 11.0 - (raw - kLowScore + 1.0) / (kHighScore - kLowScore) * 9.0;
  if (s > 8.0) {
    s = 8.0 + std::log(s + 1.0 - 9.0);
  }
  t.score = std::clamp(s, 1.0, 10.0);
  return t;
}

double sa_score(const chem::Molecule& m, const FragmentTable& table) {
  return sa_terms(m, table).score;
}

}  // namespace molspo::critics
