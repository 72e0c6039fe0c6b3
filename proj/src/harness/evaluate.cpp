#include "molspo/harness/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "molspo/chem/molecule.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/harness/errors.hpp"

namespace molspo::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean(std::span<const double> v) {
  if (v.empty()) {
    return kNaN;
  }
  double s = 0;
  for (const double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

std::optional<chem::Molecule> try_parse(const std::string& s) {
  if (s.empty()) {
    return std::nullopt;
  }
  try {
    auto m = chem::parse_smiles(s);
    if (m.atom_count() == 0) {
      return std::nullopt;
    }
    return m;
  } catch (const chem::SmilesError&) {
    return std::nullopt;
  } catch (const chem::MoleculeError&) {
    return std::nullopt;
  }
}

std::string format(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

double top_fraction_mean(std::span<const double> values, double fraction) {
  if (values.empty()) {
    return kNaN;
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto n = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-9));
  const auto take = std::clamp<std::size_t>(n, 1, sorted.size());
  return mean(std::span<const double>(sorted.data(), take));
}

std::vector<std::string> canonical_forms(std::span<const std::string> smiles) {
  std::vector<std::string> out;
  for (const auto& s : smiles) {
    if (auto m = try_parse(s)) {
      out.push_back(chem::write_smiles(*m));
    }
  }
  return out;
}

double novelty(std::span<const std::string> generated_canonical,
               const std::unordered_set<std::string>& dataset) {
  if (generated_canonical.empty()) {
    return kNaN;
  }
  const auto fresh = std::count_if(generated_canonical.begin(), generated_canonical.end(),
                                   [&](const std::string& s) { return !dataset.contains(s); });
  return static_cast<double>(fresh) / static_cast<double>(generated_canonical.size());
}

double diversity(std::span<const std::string> generated_canonical) {
  if (generated_canonical.empty()) {
    return kNaN;
  }
  const std::unordered_set<std::string> distinct(generated_canonical.begin(),
                                                 generated_canonical.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(generated_canonical.size());
}

EvalReport evaluate(std::span<const GeneratedPair> pairs, critics::CriticSuite& suite,
                    const critics::RewardWeights& weights,
                    const std::unordered_set<std::string>& dataset,
                    std::optional<double> similarity_filter) {
  EvalReport r;
  r.total = pairs.size();
  std::vector<double> composites;
  std::vector<double> tanimotos;
  std::array<std::vector<double>, critics::kCriticCount> props;
  std::vector<std::string> canonical;
  for (const auto& p : pairs) {
    const auto x = try_parse(p.original);
    if (!x) {
      throw HarnessError(HarnessErrorKind::kData, "unparseable original: " + p.original);
    }
    const auto y = try_parse(p.generated);
    if (!y) {
      continue;
    }
    ++r.valid;
    canonical.push_back(chem::write_smiles(*y));
    const auto b = suite.composite_reward(*x, *y, weights);
    if (similarity_filter && b.tanimoto_raw < *similarity_filter) {
      continue;
    }
    ++r.kept;
    composites.push_back(b.composite);
    tanimotos.push_back(b.tanimoto_raw);
    for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
      props[c].push_back(b.raw[c]);
    }
  }
  r.validity = r.total == 0 ? kNaN : static_cast<double>(r.valid) / static_cast<double>(r.total);
  r.avg_norm_reward = mean(composites);
  r.top10_norm_reward = top_fraction_mean(composites, 0.1);
  for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
    r.critic_means[c] = mean(props[c]);
  }
  r.avg_tanimoto = mean(tanimotos);
  r.novelty = novelty(canonical, dataset);
  r.diversity = diversity(canonical);
  r.empty_after_filter = r.kept == 0;
  return r;
}

std::vector<std::string> report_columns() {
  std::vector<std::string> cols{"total", "valid", "kept", "validity", "avg_norm_reward",
                                "top10_norm_reward"};
  for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
    cols.push_back(std::string("mean_") + critics::to_string(static_cast<critics::Critic>(c)));
  }
  cols.insert(cols.end(), {"avg_tanimoto", "novelty", "diversity"});
  return cols;
}

std::vector<double> report_values(const EvalReport& r) {
  std::vector<double> v{static_cast<double>(r.total), static_cast<double>(r.valid),
                        static_cast<double>(r.kept), r.validity, r.avg_norm_reward,
                        r.top10_norm_reward};
  v.insert(v.end(), r.critic_means.begin(), r.critic_means.end());
  v.insert(v.end(), {r.avg_tanimoto, r.novelty, r.diversity});
  return v;
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  const auto cols = report_columns();
  const auto vals = report_values(r);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << "\n";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out << (i ? "," : "") << format(vals[i]);
  }
  out << "\n";
}

EvalReport read_report_csv(std::istream& in) {
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw HarnessError(HarnessErrorKind::kData, "evaluation file is truncated");
  }
  const auto cols = report_columns();
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    expected += (i ? "," : "") + cols[i];
  }
  if (header != expected) {
    throw HarnessError(HarnessErrorKind::kData, "unexpected evaluation header");
  }
  std::vector<double> v;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw HarnessError(HarnessErrorKind::kData, "bad evaluation value: " + cell);
    }
  }
  if (v.size() != cols.size()) {
    throw HarnessError(HarnessErrorKind::kData, "evaluation row has the wrong width");
  }
  EvalReport r;
  r.total = static_cast<std::size_t>(v[0]);
  r.valid = static_cast<std::size_t>(v[1]);
  r.kept = static_cast<std::size_t>(v[2]);
  r.validity = v[3];
  r.avg_norm_reward = v[4];
  r.top10_norm_reward = v[5];
  for (std::size_t c = 0; c < critics::kCriticCount; ++c) {
    r.critic_means[c] = v[6 + c];
  }
  r.avg_tanimoto = v[6 + critics::kCriticCount];
  r.novelty = v[7 + critics::kCriticCount];
  r.diversity = v[8 + critics::kCriticCount];
  r.empty_after_filter = r.kept == 0;
  return r;
}

}  // namespace molspo::harness
