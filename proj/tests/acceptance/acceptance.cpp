// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. `acceptance N` runs criterion N alone.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_path.hpp"
#include "isomorphism.hpp"
#include "molspo/chem/scaffold.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/common/rng.hpp"
#include "molspo/critics/reward.hpp"
#include "molspo/decode/decode.hpp"
#include "molspo/fp/fingerprint.hpp"
#include "molspo/harness/critics_setup.hpp"
#include "molspo/harness/pipeline.hpp"
#include "molspo/lm/training.hpp"
#include "molspo/spo/advantage.hpp"
#include "molspo/spo/finetune.hpp"
#include "molspo/spo/toy.hpp"
#include "molspo/surrogate/surrogate.hpp"
#include "molspo/tokenizer/bpe.hpp"

using namespace molspo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() { return fs::path(MOLSPO_ACCEPTANCE_WORK); }

const std::vector<std::string>& molecules() {
  static const auto m = testing::corpus_lines();
  return m;
}

critics::CriticSuite& desk_suite() {
  static critics::CriticSuite s(harness::desk_critic_specs(),
                                harness::fit_fragments(molecules()), harness::mock_docking());
  return s;
}

const tokenizer::Vocabulary& desk_vocab() {
  static const auto v = tokenizer::train_bpe(molecules(), 160);
  return v;
}

// ---------------------------------------------------------------- toy oracles

// Max reward over every sequence extending `prefix`, by direct scan.
double scan_best(const spo::toy::Environment& env, std::span<const int> prefix) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < env.sequence_count(); ++i) {
    const auto s = env.sequence(i);
    if (std::equal(prefix.begin(), prefix.end(), s.begin())) {
      best = std::max(best, env.rewards[i]);
    }
  }
  return best;
}

double scan_partial(const spo::toy::Environment& env, std::span<const int> x,
                    std::span<const int> y, int j) {
  const auto n = static_cast<std::size_t>(j);
  return scan_best(env, y.first(n)) - scan_best(env, x.first(n));
}

// Central differences of log pi(seq[0..t)) over every table entry.
lm::Matrix numeric_grad(spo::toy::TabularPolicy& policy, int o, std::span<const int> seq, int t) {
  const double h = 1e-6;
  auto& theta = policy.theta();
  lm::Matrix g(theta.rows(), theta.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double saved = theta.data()[i];
    theta.data()[i] = saved + h;
    const double up = policy.log_prob(o, seq, t);
    theta.data()[i] = saved - h;
    const double down = policy.log_prob(o, seq, t);
    theta.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

Outcome estimator_decomposition() {
  double worst = 0.0;
  double scale = 0.0;
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto env = spo::toy::Environment::random(3, 3, 2, 1000 + seed);
    spo::toy::TabularPolicy policy(env, 1.0, 77 + seed);
    const lm::Matrix exact = spo::toy::expected_gradient(policy, env);

    lm::Matrix decomposed = lm::Matrix::Zero(exact.rows(), exact.cols());
    const double rho = 1.0 / static_cast<double>(env.originals.size());
    const double T = env.horizon;
    for (std::size_t o = 0; o < env.originals.size(); ++o) {
      const auto& x = env.originals[o];
      const int oi = static_cast<int>(o);
      for (std::size_t i = 0; i < env.sequence_count(); ++i) {
        const auto y = env.sequence(i);
        const double p = std::exp(policy.log_prob(oi, y, env.horizon));
        for (int t = 1; t <= env.horizon; ++t) {
          decomposed += rho * p / (2 * T) * scan_partial(env, x, y, t) *
                        numeric_grad(policy, oi, y, t);
        }
        decomposed += rho * p * 0.5 * (env.rewards[i] - env.reward(x)) *
                      numeric_grad(policy, oi, y, env.horizon);
      }
    }
    worst = std::max(worst, (exact - decomposed).cwiseAbs().maxCoeff());
    scale = std::max(scale, exact.cwiseAbs().maxCoeff());
    ++cases;
  }
  return {worst < 1e-6 && scale > 1e-3,
          std::to_string(cases) + " environments, max coordinate gap " + fmt("%.2e", worst) +
              ", max |grad| " + fmt("%.3f", scale)};
}

// Enumerates deterministic policies as digit strings over the prefix
// states and compares the argmax sets of both objectives.
struct SetCheck {
  bool equal = false;
  std::size_t size = 0;
};

SetCheck enumerate_policies(const spo::toy::Environment& env, std::size_t o) {
  const int V = env.vocab;
  const int T = env.horizon;
  // prefix states in breadth-first order; state id of a prefix
  std::vector<std::size_t> level_start{0};
  std::size_t states = 0;
  for (int l = 0, width = 1; l < T; ++l, width *= V) {
    level_start.push_back(level_start.back() + static_cast<std::size_t>(width));
    states += static_cast<std::size_t>(width);
  }
  const auto& x = env.originals[o];
  std::vector<double> j_of(env.sequence_count()), j0_of(env.sequence_count());
  for (std::size_t i = 0; i < env.sequence_count(); ++i) {
    const auto y = env.sequence(i);
    double partial = 0;
    for (int t = 1; t <= T; ++t) {
      partial += scan_partial(env, x, y, t);
    }
    j0_of[i] = env.rewards[i] - env.reward(x);
    j_of[i] = 0.5 * partial / T + 0.5 * j0_of[i];
  }
  std::size_t total = 1;
  for (std::size_t s = 0; s < states; ++s) {
    total *= static_cast<std::size_t>(V);
  }
  std::vector<std::size_t> emitted(total);
  std::vector<int> digits(states);
  std::vector<int> y(static_cast<std::size_t>(T));
  for (std::size_t pi = 0; pi < total; ++pi) {
    std::size_t rest = pi;
    for (std::size_t s = 0; s < states; ++s) {
      digits[s] = static_cast<int>(rest % static_cast<std::size_t>(V));
      rest /= static_cast<std::size_t>(V);
    }
    std::size_t within = 0;  // index of the prefix inside its level
    for (int l = 0; l < T; ++l) {
      const int tok = digits[level_start[static_cast<std::size_t>(l)] + within];
      y[static_cast<std::size_t>(l)] = tok;
      within = within * static_cast<std::size_t>(V) + static_cast<std::size_t>(tok);
    }
    emitted[pi] = env.index(y);
  }
  auto argmax = [&](const std::vector<double>& value) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto e : emitted) {
      best = std::max(best, value[e]);
    }
    std::set<std::size_t> out;
    for (std::size_t pi = 0; pi < total; ++pi) {
      if (value[emitted[pi]] >= best - 1e-12) {
        out.insert(pi);
      }
    }
    return out;
  };
  const auto a = argmax(j_of);
  const auto b = argmax(j0_of);
  return {a == b, a.size()};
}

Outcome optimizer_sets() {
  const std::vector<std::pair<int, int>> shapes{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3},
                                                {4, 2}, {3, 3}, {2, 4}, {3, 3}, {4, 2}};
  int agree = 0;
  double strict = 1.0;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto env = spo::toy::Environment::random(shapes[k].first, shapes[k].second, 1, 500 + k);
    const auto own = enumerate_policies(env, 0);
    const auto lib = spo::toy::verify_lemma_equivalence(env);
    strict = std::min(strict, lib.strict_fraction);
    if (own.equal && lib.sets_equal && lib.argmax_j == own.size) {
      ++agree;
    }
  }
  return {agree == static_cast<int>(shapes.size()),
          std::to_string(agree) + "/" + std::to_string(shapes.size()) +
              " environments agree, min strict-gain share " + fmt("%.2f", strict)};
}

// ---------------------------------------------------------------- numerics

Outcome autodiff_check() {
  lm::ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.dim = 16;
  c.context = 32;
  c.vocab = 24;
  c.init_scale = 0.3;
  lm::PolicyModel model(c, 5);
  const std::vector<int> x{5, 9, 11, 7, 20};
  const std::vector<int> y{6, 13, 22, 8};
  const auto seq = tokenizer::serialize_pair(x, y);
  {
    lm::Tape t;
    t.backward(lm::nll(t, model, seq));
  }
  // five-point central stencil: truncation O(h^4), rounding ~eps*|nll|/h
  const double h = 1e-4;
  double worst = 0.0;
  std::size_t checked = 0;
  for (auto& p : model.parameters()) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      const double saved = p.value.data()[i];
      const auto at = [&](double offset) {
        p.value.data()[i] = saved + offset;
        return lm::nll(model, seq);
      };
      const double numeric = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      p.value.data()[i] = saved;
      const double analytic = p.grad.data()[i];
      // below 1e-6 both sides are at the finite-difference noise floor
      const double rel = std::abs(numeric - analytic) /
                         std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, rel);
      ++checked;
    }
  }
  return {worst < 1e-4, std::to_string(checked) + " parameters, max relative error " +
                            fmt("%.2e", worst)};
}

Outcome top_pk_contract() {
  Rng rng(2024);
  const double ps[] = {0.85, 0.9, 0.95};
  const int ks[] = {10, 15, 20};
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(60));
    std::vector<double> w(static_cast<std::size_t>(n));
    const bool quantized = trial % 3 == 0;  // forces probability ties
    for (auto& v : w) {
      const double e = -std::log(rng.uniform_open());
      v = quantized ? std::floor(e * 4) + 1 : std::pow(e, 1 + trial % 5);
    }
    double sum = 0;
    for (const double v : w) sum += v;
    for (auto& v : w) v /= sum;
    const double p = ps[rng.below(3)];
    const int k = ks[rng.below(3)];

    const auto got = decode::top_pk_candidates(w, p, k);

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return w[static_cast<std::size_t>(a)] > w[static_cast<std::size_t>(b)];
    });
    std::vector<int> expect;
    double mass = 0;
    for (const int id : order) {
      if (static_cast<int>(expect.size()) == k) break;
      expect.push_back(id);
      mass += w[static_cast<std::size_t>(id)];
      if (mass >= p) break;
    }
    double got_mass = 0;
    for (const int id : got) got_mass += w[static_cast<std::size_t>(id)];
    double without_last = got_mass - (got.empty() ? 0 : w[static_cast<std::size_t>(got.back())]);
    const bool contract = got_mass >= p || static_cast<int>(got.size()) == k;
    const bool minimal = got.size() <= 1 || without_last < p;
    const std::vector<int> got_v(got.begin(), got.end());
    if (contract && minimal && got_v == expect) {
      ++ok;
    }
  }
  return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " distributions"};
}

Outcome bon_monotonicity() {
  lm::ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.dim = 16;
  c.context = 96;
  c.vocab = desk_vocab().size();
  c.init_scale = 0.5;
  const lm::PolicyModel model(c, 3);
  decode::PolicyStepModel step(model);
  // hash reward in [0, 1); a fifth of the sequences count as invalid
  const decode::RewardFn reward = [](const decode::Generation& g) -> std::optional<double> {
    std::string bytes;
    for (const int t : g.tokens) bytes += std::to_string(t) + ",";
    const auto h = fp::fnv1a64(bytes);
    if (h % 5 == 0) return std::nullopt;
    return static_cast<double>(h % 100000) / 100000.0;
  };
  decode::DecodeParams params;
  params.max_length = 16;
  Rng pick(9);
  int ok = 0;
  const int prefixes = 200;
  for (int i = 0; i < prefixes; ++i) {
    const auto& s = molecules()[pick.below(molecules().size())];
    auto prompt = tokenizer::source_prompt(desk_vocab().encode(s));
    const auto extra = pick.below(4);
    for (std::uint64_t e = 0; e < extra; ++e) {
      prompt.push_back(tokenizer::kSpecialCount +
                       static_cast<int>(pick.below(static_cast<std::uint64_t>(
                           desk_vocab().size() - tokenizer::kSpecialCount))));
    }
    double last = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const int n : {1, 4, 6, 8}) {
      const auto b = decode::best_of_n(step, prompt, n, reward, params, 1000 + i);
      const double r = b.all_invalid() ? -std::numeric_limits<double>::infinity() : b.reward;
      monotone = monotone && r >= last;
      last = r;
    }
    ok += monotone ? 1 : 0;
  }
  return {ok == prefixes, std::to_string(ok) + "/" + std::to_string(prefixes) + " prefixes"};
}

Outcome reward_algebra() {
  int weight_ok = 0;
  for (const double beta : {0.2, 0.4, 0.6, 0.8}) {
    const auto w = critics::RewardWeights::from_beta(beta);
    weight_ok += std::abs(w.beta_sim + 4 * w.lambda_c - 1.0) < 1e-12 ? 1 : 0;
  }
  Rng rng(17);
  int in_range = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = chem::parse_smiles(molecules()[rng.below(molecules().size())]);
    const auto y = chem::parse_smiles(molecules()[rng.below(molecules().size())]);
    const double beta = 0.2 * static_cast<double>(1 + rng.below(4));
    const auto b = desk_suite().composite_reward(x, y, critics::RewardWeights::from_beta(beta));
    in_range += b.composite >= 0.0 && b.composite <= 1.0 ? 1 : 0;
  }

  lm::ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.dim = 16;
  c.context = 160;
  c.vocab = desk_vocab().size();
  c.init_scale = 0.3;
  const lm::PolicyModel model(c, 21);
  decode::PolicyStepModel step(model);
  spo::SpoScorer scorer(desk_suite(), desk_vocab(), critics::RewardWeights::from_beta(0.2));
  decode::DecodeParams greedy;
  greedy.k = 1;
  greedy.max_length = 40;
  int reduced = 0;
  const int pairs = 50;
  for (int i = 0; i < pairs; ++i) {
    const auto xs = chem::write_smiles(chem::parse_smiles(molecules()[rng.below(molecules().size())]));
    const auto ys = chem::write_smiles(chem::parse_smiles(molecules()[rng.below(molecules().size())]));
    const auto xm = chem::parse_smiles(xs);
    const auto x = desk_vocab().encode(xs);
    const auto y = desk_vocab().encode(ys);
    const auto r = scorer.reward_fn(xm);
    for (const auto mode : {spo::InvalidMode::kZero, spo::InvalidMode::kMinusRcX}) {
      const double full = spo::full_advantage(r(y), scorer.reward_x(xm), mode);
      const double partial = spo::partial_advantage(step, tokenizer::source_prompt(x), x, y, 1.0,
                                                    4, r, greedy, mode, 100 + i);
      reduced += partial == full ? 1 : 0;
    }
  }
  const bool pass = weight_ok == 4 && in_range == 1000 && reduced == 2 * pairs;
  return {pass, "weights " + std::to_string(weight_ok) + "/4, composite in range " +
                    std::to_string(in_range) + "/1000, u=1 reductions " +
                    std::to_string(reduced) + "/" + std::to_string(2 * pairs)};
}

Outcome chemistry_core() {
  int round_trip = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto m = chem::parse_smiles(molecules()[static_cast<std::size_t>(i)]);
    const auto again = chem::parse_smiles(chem::write_smiles(m));
    round_trip += testing::isomorphic(m, again) ? 1 : 0;
  }
  std::vector<fp::Fingerprint> fps;
  for (const auto& s : molecules()) {
    fps.push_back(fp::morgan_fingerprint(chem::parse_smiles(s)));
  }
  Rng rng(4);
  int sym = 0;
  const int pairs = 10000;
  for (int i = 0; i < pairs; ++i) {
    fp::Fingerprint a = fps[rng.below(fps.size())];
    fp::Fingerprint b = fps[rng.below(fps.size())];
    if (i % 2 == 1) {  // random bit patterns as well as molecular ones
      std::string ha, hb;
      for (int d = 0; d < fp::kDefaultBits / 4; ++d) {
        ha += "0123456789abcdef"[rng.below(16)];
        hb += "0123456789abcdef"[rng.below(16)];
      }
      a = fp::Fingerprint::from_hex(ha);
      b = fp::Fingerprint::from_hex(hb);
    }
    sym += fp::tanimoto(a, b) == fp::tanimoto(b, a) && fp::tanimoto(a, a) == 1.0 ? 1 : 0;
  }
  int idem = 0;
  for (int i = 0; i < n; ++i) {
    const auto s1 = chem::murcko_scaffold(chem::parse_smiles(molecules()[static_cast<std::size_t>(i)]));
    const auto s2 = chem::murcko_scaffold(s1.molecule);
    idem += s1.smiles() == s2.smiles() ? 1 : 0;
  }
  const bool pass = round_trip * 1000 >= 999 * n && sym == pairs && idem == n;
  return {pass, "round trip " + std::to_string(round_trip) + "/" + std::to_string(n) +
                    ", tanimoto " + std::to_string(sym) + "/" + std::to_string(pairs) +
                    ", scaffold " + std::to_string(idem) + "/" + std::to_string(n)};
}

Outcome surrogate_sanity() {
  const auto start = std::chrono::steady_clock::now();
  const surrogate::AffineTarget target;
  Rng rng(8);
  std::vector<corpus::ScoredMolecule> rows;
  for (const auto& s : molecules()) {
    rows.push_back({s, target.sample(chem::parse_smiles(s), rng)});
  }
  surrogate::SurrogateConfig c;
  c.blocks = 2;
  c.heads = 2;
  c.dim = 32;
  c.hidden = 32;
  surrogate::SurrogateTrainOptions opt;
  opt.epochs = 30;
  opt.seed = 1;
  opt.time_budget_seconds = 240;
  const auto out = surrogate::train_surrogate(rows, desk_vocab(), c, opt);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {out.report.final_r2 >= 0.8 && secs < 300,
          std::to_string(rows.size()) + " molecules, validation r2 " +
              fmt("%.3f", out.report.final_r2) + " in " + fmt("%.0f", secs) + " s"};
}

// ---------------------------------------------------------------- pipeline

struct MetricRow {
  double mean_rap = 0;
  double avg_norm_reward = 0;
};

std::vector<MetricRow> read_metrics(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  const auto rap = col("mean_rap");
  const auto anr = col("avg_norm_reward");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    rows.push_back({std::stod(f.at(rap)), std::stod(f.at(anr))});
  }
  return rows;
}

harness::CommandContext smoke_context(const fs::path& dir, std::uint64_t seed) {
  harness::CommandContext ctx;
  ctx.config = harness::PipelineConfig::smoke();
  ctx.config.seed = seed;
  ctx.config.molecules = testing::data_path("molecules.smi");
  ctx.run_dir = dir;
  return ctx;
}

void run_chain(const harness::CommandContext& ctx, std::initializer_list<const char*> steps) {
  for (const char* s : steps) {
    harness::run_command(s, ctx);
  }
}

constexpr std::uint64_t kSmokeSeeds[] = {1, 2, 3, 4, 5};

fs::path smoke_dir(std::uint64_t seed) { return work_dir() / ("smoke_" + std::to_string(seed)); }

// Runs the smoke chain once per seed; later criteria reuse the artifacts.
void ensure_smoke_runs() {
  for (const auto seed : kSmokeSeeds) {
    if (!fs::exists(smoke_dir(seed) / "evaluation.csv")) {
      run_chain(smoke_context(smoke_dir(seed), seed),
                {"build-corpus", "pretrain", "build-buffer", "finetune", "generate", "evaluate"});
    }
  }
}

Outcome smoke_improvement() {
  const auto start = std::chrono::steady_clock::now();
  ensure_smoke_runs();
  int improved = 0;
  std::string per_seed;
  for (const auto seed : kSmokeSeeds) {
    const auto rows = read_metrics(smoke_dir(seed) / "metrics.csv");
    if (rows.size() != 20) {
      return {false, "expected 20 epochs, got " + std::to_string(rows.size())};
    }
    double first = 0, last = 0;
    for (int e = 0; e < 5; ++e) {
      first += rows[static_cast<std::size_t>(e)].mean_rap / 5;
      last += rows[rows.size() - 5 + static_cast<std::size_t>(e)].mean_rap / 5;
    }
    improved += last > first ? 1 : 0;
    per_seed += " " + fmt("%+.3f", last - first);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {improved >= 4 && secs < 600,
          std::to_string(improved) + "/5 runs improved (last5 - first5:" + per_seed + ") in " +
              fmt("%.0f", secs) + " s"};
}

Outcome ablation_direction() {
  ensure_smoke_runs();
  std::vector<double> diffs;  // without - with
  for (const auto seed : kSmokeSeeds) {
    const auto dir = work_dir() / ("ablation_" + std::to_string(seed));
    fs::create_directories(dir);
    for (const char* f : {"policy.ckpt", "buffer.csv"}) {
      fs::copy_file(smoke_dir(seed) / f, dir / f, fs::copy_options::overwrite_existing);
    }
    auto ctx = smoke_context(dir, seed);
    ctx.config.spo.use_partial = false;
    ctx.config.save_epoch_checkpoints = false;
    harness::run_command("finetune", ctx);
    const double with = read_metrics(smoke_dir(seed) / "metrics.csv").back().avg_norm_reward;
    const double without = read_metrics(dir / "metrics.csv").back().avg_norm_reward;
    diffs.push_back(without - with);
  }
  double mean = 0;
  for (const double d : diffs) mean += d / static_cast<double>(diffs.size());
  double var = 0;
  for (const double d : diffs) var += (d - mean) * (d - mean) / static_cast<double>(diffs.size() - 1);
  const double noise = 2 * std::sqrt(var / static_cast<double>(diffs.size()));
  return {mean <= noise, "mean(without - with) " + fmt("%+.4f", mean) + " vs noise 2*SE " +
                             fmt("%.4f", noise)};
}

Outcome determinism() {
  ensure_smoke_runs();
  const auto dir = work_dir() / "rerun_1";
  fs::remove_all(dir);
  const auto ctx = smoke_context(dir, kSmokeSeeds[0]);
  run_chain(ctx, {"build-corpus", "pretrain", "build-buffer", "finetune", "generate", "evaluate"});
  int same = 0;
  const std::vector<std::string> files{"corpus_train.tsv", "vocab.txt",      "policy.ckpt",
                                       "buffer.csv",       "metrics.csv",    "finetuned.ckpt",
                                       "generations.csv",  "evaluation.csv", "manifest.json"};
  for (const auto& f : files) {
    same += harness::file_digest(dir / f) == harness::file_digest(smoke_dir(kSmokeSeeds[0]) / f)
                ? 1
                : 0;
  }
  return {same == static_cast<int>(files.size()),
          std::to_string(same) + "/" + std::to_string(files.size()) +
              " artifacts bit-identical, metrics.csv included"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"estimator decomposition on enumerable toy", estimator_decomposition},
      {"optimizer set equality on random toys", optimizer_sets},
      {"autodiff vs central differences", autodiff_check},
      {"top-pk contract", top_pk_contract},
      {"best-of-n monotone under nested streams", bon_monotonicity},
      {"reward algebra and u=1 reduction", reward_algebra},
      {"chemistry core", chemistry_core},
      {"surrogate fits affine target", surrogate_sanity},
      {"spo smoke improvement", smoke_improvement},
      {"partial-term ablation direction", ablation_direction},
      {"determinism of pipeline artifacts", determinism},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
  }
  if (only == 0) {
    fs::remove_all(work_dir());
  }
  fs::create_directories(work_dir());

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
