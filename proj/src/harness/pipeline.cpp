#include "molspo/harness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "molspo/chem/smiles.hpp"
#include "molspo/common/rng.hpp"
#include "molspo/corpus/corpus.hpp"
#include "molspo/decode/decode.hpp"
#include "molspo/harness/errors.hpp"
#include "molspo/lm/checkpoint.hpp"
#include "molspo/lm/training.hpp"
#include "molspo/spo/finetune.hpp"
#include "molspo/surrogate/surrogate.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::harness {

namespace {

// Stream ids under the run seed, one per consumer.
enum Stream : std::uint64_t {
  kCorpusStream = 1,
  kPolicyInitStream,
  kPretrainStream,
  kSurrogateStream,
  kBufferStream,
  kSpoStream,
  kGenerateStream,
};

std::ostream& log(const CommandContext& ctx) {
  static std::ostream null(nullptr);
  return ctx.log ? *ctx.log : null;
}

void snapshot(const CommandContext& ctx, const RunDirectory& run) {
  std::ofstream out(run.path("config.cfg"));
  ctx.config.to_kv().write(out);
}

void finish(const CommandContext& ctx, const RunDirectory& run, const std::string& command,
            std::vector<std::string> outputs) {
  snapshot(ctx, run);
  outputs.push_back("config.cfg");
  run.record(command, ctx.config.seed, outputs);
}

std::filesystem::path require_input(const std::filesystem::path& p, std::string_view what) {
  if (p.empty() || !std::filesystem::exists(p)) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact,
                       std::string(what) + " not found: " + p.string());
  }
  return p;
}

std::vector<std::string> pair_molecules(std::span<const corpus::MoleculePair> train,
                                        std::span<const corpus::MoleculePair> valid) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto span : {train, valid}) {
    for (const auto& p : span) {
      for (const auto* s : {&p.x, &p.y}) {
        if (seen.insert(*s).second) {
          out.push_back(*s);
        }
      }
    }
  }
  return out;
}

std::string canonical(const std::string& smiles) {
  return chem::write_smiles(chem::parse_smiles(smiles));
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0;
  for (const double x : v) {
    s += x;
  }
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for a single run.
double std_of(std::span<const double> v) {
  if (v.size() < 2) {
    return 0.0;
  }
  const double m = mean_of(v);
  double s = 0;
  for (const double x : v) {
    s += (x - m) * (x - m);
  }
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

// (epoch, avg_tanimoto) from a metrics.csv.
std::vector<std::pair<int, double>> similarity_series(const std::filesystem::path& metrics) {
  std::ifstream in(metrics);
  std::string line;
  if (!std::getline(in, line)) {
    throw HarnessError(HarnessErrorKind::kData, "empty metrics file: " + metrics.string());
  }
  const auto header = csv_fields(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "avg_tanimoto") {
      col = i;
    }
  }
  if (col == header.size() || header.empty() || header[0] != "epoch") {
    throw HarnessError(HarnessErrorKind::kData, "unexpected metrics header: " + metrics.string());
  }
  std::vector<std::pair<int, double>> out;
  while (std::getline(in, line)) {
    const auto f = csv_fields(line);
    if (f.size() != header.size()) {
      throw HarnessError(HarnessErrorKind::kData, "ragged metrics row: " + metrics.string());
    }
    out.emplace_back(std::stoi(f[0]), std::stod(f[col]));
  }
  return out;
}

}  // namespace

critics::CriticSuite make_suite(const PipelineConfig& config, const RunDirectory& run) {
  const auto molecules = corpus::load_smiles(require_input(config.molecules, "molecule file"));
  critics::DockingFn docking = mock_docking();
  if (config.docking == DockingSource::kSurrogate) {
    auto model = std::make_shared<surrogate::SurrogateModel>(
        surrogate::SurrogateModel::load(run.require("surrogate.ckpt", "surrogate checkpoint")));
    docking = [model](const chem::Molecule& m, std::string_view) { return model->predict(m); };
  }
  return critics::CriticSuite(config.critics, fit_fragments(molecules), std::move(docking));
}

void build_corpus(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  const auto molecules = corpus::load_smiles(require_input(c.molecules, "molecule file"));
  const auto pc = corpus::build_pretrain_corpus(
      molecules, static_cast<std::size_t>(c.corpus_pairs), derive_seed(c.seed, kCorpusStream),
      c.train_fraction);
  if (pc.shortfall > 0) {
    log(ctx) << "warning: corpus is " << pc.shortfall << " pairs short after " << pc.attempts
             << " attempts\n";
  }
  corpus::save_pairs(run.path("corpus_train.tsv"), pc.train);
  corpus::save_pairs(run.path("corpus_valid.tsv"), pc.valid);
  // canonical forms of the whole file, so any buffer molecule tokenizes
  std::vector<std::string> texts;
  texts.reserve(molecules.size());
  for (const auto& s : molecules) {
    texts.push_back(canonical(s));
  }
  const auto vocab = tokenizer::train_bpe(texts, c.vocab_size);
  vocab.save(run.path("vocab.txt"));
  log(ctx) << "pairs train=" << pc.train.size() << " valid=" << pc.valid.size()
           << " vocab=" << vocab.size() << "\n";
  finish(ctx, run, "build-corpus", {"corpus_train.tsv", "corpus_valid.tsv", "vocab.txt"});
}

void pretrain(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  const auto vocab = tokenizer::Vocabulary::load(run.require("vocab.txt", "vocabulary"));
  const auto train = corpus::load_pairs(run.require("corpus_train.tsv", "training pairs"));
  const auto valid = corpus::load_pairs(run.require("corpus_valid.tsv", "validation pairs"));

  lm::ModelConfig mc = c.model;
  mc.vocab = vocab.size();
  lm::PolicyModel model(mc, derive_seed(c.seed, kPolicyInitStream));
  const auto enc_train = lm::encode_pairs(vocab, train);
  const auto enc_valid = lm::encode_pairs(vocab, valid);

  std::ofstream curve(run.path("pretrain_loss.csv"));
  curve << "epoch,train_nll,train_loss,valid_nll\n";
  lm::PretrainOptions po;
  po.epochs = c.pretrain_epochs;
  po.batch = c.pretrain_batch;
  po.lr = c.pretrain_lr;
  po.lambda_mix = c.lambda_mix;
  po.clip_norm = c.pretrain_clip;
  po.seed = derive_seed(c.seed, kPretrainStream);
  po.checkpoint_dir = run.path("checkpoints") / "pretrain";
  po.on_epoch = [&](const lm::EpochStats& s) {
    curve << s.epoch << "," << fmt(s.train_nll) << "," << fmt(s.train_loss) << ","
          << fmt(s.valid_nll) << "\n";
    log(ctx) << "pretrain epoch " << s.epoch << " nll " << s.train_nll << " valid "
             << s.valid_nll << "\n";
  };
  lm::pretrain(model, vocab, enc_train, enc_valid, po);
  curve.close();
  lm::save_policy(run.path("policy.ckpt"), model, vocab);
  finish(ctx, run, "pretrain", {"policy.ckpt", "pretrain_loss.csv"});
}

void train_surrogate(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  if (c.surrogate_data.empty()) {
    throw HarnessError(HarnessErrorKind::kUsage, "surrogate.data is not set");
  }
  const auto rows = corpus::load_scored_csv(require_input(c.surrogate_data, "surrogate data"));
  std::vector<std::string> texts;
  texts.reserve(rows.size());
  for (const auto& r : rows) {
    texts.push_back(canonical(r.smiles));
  }
  const auto vocab = tokenizer::train_bpe(texts, c.vocab_size);

  std::ofstream curve(run.path("surrogate_report.csv"));
  curve << "epoch,train_mse,valid_r2\n";
  surrogate::SurrogateTrainOptions so;
  so.epochs = c.surrogate_epochs;
  so.batch = c.surrogate_batch;
  so.lr = c.surrogate_lr;
  so.seed = derive_seed(c.seed, kSurrogateStream);
  so.on_epoch = [&](int epoch, double mse, double r2) {
    curve << epoch << "," << fmt(mse) << "," << fmt(r2) << "\n";
    log(ctx) << "surrogate epoch " << epoch << " mse " << mse << " r2 " << r2 << "\n";
  };
  const auto trained = surrogate::train_surrogate(rows, vocab, c.surrogate, so);
  curve.close();
  trained.model.save(run.path("surrogate.ckpt"));
  log(ctx) << "surrogate validation r2 " << trained.report.final_r2 << "\n";
  finish(ctx, run, "train-surrogate", {"surrogate.ckpt", "surrogate_report.csv"});
}

void build_buffer(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  std::vector<std::string> candidates;
  if (c.buffer_from_corpus) {
    const auto train = corpus::load_pairs(run.require("corpus_train.tsv", "training pairs"));
    const auto valid = corpus::load_pairs(run.require("corpus_valid.tsv", "validation pairs"));
    candidates = pair_molecules(train, valid);
  } else {
    candidates = corpus::load_smiles(require_input(c.molecules, "molecule file"));
  }
  critics::DockingFn docking = mock_docking();
  if (c.docking == DockingSource::kSurrogate) {
    auto model = std::make_shared<surrogate::SurrogateModel>(
        surrogate::SurrogateModel::load(run.require("surrogate.ckpt", "surrogate checkpoint")));
    docking = [model](const chem::Molecule& m, std::string_view) { return model->predict(m); };
  }
  std::vector<corpus::ScoredMolecule> rows;
  rows.reserve(candidates.size());
  for (const auto& s : candidates) {
    const auto m = chem::parse_smiles(s);
    const auto canon = chem::write_smiles(m);
    rows.push_back({canon, docking(m, canon)});
  }
  corpus::save_scored_csv(run.path("scored.csv"), rows);
  const auto buffer = corpus::build_finetune_buffer(rows, static_cast<std::size_t>(c.buffer_size),
                                                    derive_seed(c.seed, kBufferStream),
                                                    c.buffer_lo, c.buffer_hi);
  corpus::save_scored_csv(run.path("buffer.csv"), buffer.molecules());
  log(ctx) << "buffer " << buffer.size() << " of " << rows.size() << " scored\n";
  finish(ctx, run, "build-buffer", {"scored.csv", "buffer.csv"});
}

void finetune(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  auto policy = lm::load_policy(run.require("policy.ckpt", "checkpoint"));
  const corpus::FinetuneBuffer buffer(
      corpus::load_scored_csv(run.require("buffer.csv", "finetune buffer")));
  auto suite = make_suite(c, run);

  spo::SpoConfig sc = c.spo;
  sc.seed = derive_seed(c.seed, kSpoStream);
  const auto ckpt_dir = run.path("checkpoints") / "spo";
  if (c.save_epoch_checkpoints) {
    std::filesystem::create_directories(ckpt_dir);
  }
  std::ofstream metrics(run.path("metrics.csv"));
  std::ofstream similarity(run.path("similarity.csv"));
  spo::write_metrics_header(metrics);
  similarity << "epoch,avg_tanimoto\n";
  const auto result = spo::finetune(
      policy.model, policy.vocab, buffer, suite, sc,
      [&](const spo::EpochMetrics& m, const lm::PolicyModel& model,
          std::span<const spo::GenerationRecord>) {
        spo::write_metrics_row(metrics, m);
        metrics.flush();
        similarity << m.epoch << "," << fmt(m.avg_tanimoto) << "\n";
        if (c.save_epoch_checkpoints) {
          lm::save_policy(ckpt_dir / ("epoch_" + std::to_string(m.epoch) + ".ckpt"), model,
                          policy.vocab);
        }
        log(ctx) << "spo epoch " << m.epoch << " R_AP " << m.mean_rap << " validity "
                 << m.validity << " reward " << m.avg_norm_reward << "\n";
      });
  metrics.close();
  similarity.close();
  if (!result.best_parameters.empty()) {
    lm::assign_parameters(policy.model.parameters(), result.best_parameters);
  }
  lm::save_policy(run.path("finetuned.ckpt"), policy.model, policy.vocab);
  log(ctx) << "best epoch " << result.best_epoch << "\n";
  finish(ctx, run, "finetune", {"metrics.csv", "similarity.csv", "finetuned.ckpt"});
}

void generate(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  const auto ckpt = ctx.checkpoint.value_or(run.path("finetuned.ckpt"));
  if (!std::filesystem::exists(ckpt)) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact,
                       "checkpoint not found: " + ckpt.string());
  }
  const auto policy = lm::load_policy(ckpt);
  const auto buffer = corpus::load_scored_csv(run.require("buffer.csv", "finetune buffer"));
  decode::PolicyStepModel step(policy.model);
  const auto base = derive_seed(c.seed, kGenerateStream);

  std::ofstream out(run.path("generations.csv"));
  out << "original,generated,complete\n";
  std::size_t i = 0;
  for (const auto& row : buffer) {
    const auto x = canonical(row.smiles);
    const auto prompt = tokenizer::source_prompt(policy.vocab.encode(x));
    decode::DecodeParams params = c.spo.decode;
    params.max_length =
        std::min(params.max_length,
                 policy.model.config().context - static_cast<int>(prompt.size()) - 1);
    if (params.max_length < 1) {
      throw HarnessError(HarnessErrorKind::kData, "original too long for the context: " + x);
    }
    Rng rng(derive_seed(base, i++));
    const auto g = decode::sample_sequence(step, prompt, params, rng);
    std::string text;
    try {
      text = policy.vocab.decode(g.tokens);
    } catch (const tokenizer::TokenizerError&) {
      text.clear();  // special token in the body; counts as invalid
    }
    // the CSV has no quoting, so a stray comma would break the row
    if (text.find_first_of(",\n\r") != std::string::npos) {
      text.clear();
    }
    out << x << "," << text << "," << (g.complete ? 1 : 0) << "\n";
  }
  out.close();
  log(ctx) << "generated " << i << " molecules from " << ckpt.string() << "\n";
  finish(ctx, run, "generate", {"generations.csv"});
}

std::vector<GeneratedPair> load_generations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw HarnessError(HarnessErrorKind::kMissingArtifact,
                       "generations not found: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "original,generated,complete") {
    throw HarnessError(HarnessErrorKind::kData, "unexpected generations header");
  }
  std::vector<GeneratedPair> out;
  while (std::getline(in, line)) {
    const auto f = csv_fields(line);
    if (f.size() != 3 || (f[2] != "0" && f[2] != "1")) {
      throw HarnessError(HarnessErrorKind::kData, "bad generations row: " + line);
    }
    out.push_back({f[0], f[2] == "1" ? f[1] : std::string()});
  }
  return out;
}

void evaluate(const CommandContext& ctx) {
  const RunDirectory run(ctx.run_dir);
  const auto& c = ctx.config;
  const auto pairs = load_generations(run.require("generations.csv", "generations"));
  auto suite = make_suite(c, run);
  const auto molecules = corpus::load_smiles(require_input(c.molecules, "molecule file"));
  const auto canon = canonical_forms(molecules);
  const std::unordered_set<std::string> dataset(canon.begin(), canon.end());
  const auto r = harness::evaluate(pairs, suite, critics::RewardWeights::from_beta(c.spo.beta_sim),
                                   dataset, c.similarity_filter);
  if (r.empty_after_filter) {
    log(ctx) << "warning: no valid molecule passed the similarity filter\n";
  }
  std::ofstream out(run.path("evaluation.csv"));
  write_report_csv(out, r);
  out.close();
  log(ctx) << "validity " << r.validity << " reward " << r.avg_norm_reward << " top10 "
           << r.top10_norm_reward << " novelty " << r.novelty << " diversity " << r.diversity
           << "\n";
  finish(ctx, run, "evaluate", {"evaluation.csv"});
}

void report(const CommandContext& ctx) {
  const RunDirectory out_run(ctx.run_dir);
  const auto runs = ctx.runs.empty() ? std::vector{ctx.run_dir} : ctx.runs;

  struct Group {
    std::string label;
    std::vector<EvalReport> reports;
    std::map<int, std::vector<double>> curve;
  };
  std::vector<Group> groups;
  for (const auto& dir : runs) {
    const RunDirectory r(dir);
    std::ifstream eval(r.require("evaluation.csv", "evaluation"));
    const auto rep = read_report_csv(eval);
    std::string label = dir.filename().string();
    if (std::filesystem::exists(r.path("config.cfg"))) {
      label = KeyValueConfig::load(r.path("config.cfg")).get("label").value_or(label);
    }
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.label == label; });
    if (it == groups.end()) {
      groups.push_back({label, {}, {}});
      it = std::prev(groups.end());
    }
    it->reports.push_back(rep);
    if (std::filesystem::exists(r.path("metrics.csv"))) {
      for (const auto& [epoch, tan] : similarity_series(r.path("metrics.csv"))) {
        it->curve[epoch].push_back(tan);
      }
    }
  }

  std::ofstream table(out_run.path("report.csv"));
  table << "label,runs";
  const auto cols = report_columns();
  for (const auto& col : cols) {
    table << "," << col << "," << col << "_std";
  }
  table << "\n";
  for (const auto& g : groups) {
    table << g.label << "," << g.reports.size();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::vector<double> v;
      for (const auto& rep : g.reports) {
        v.push_back(report_values(rep)[k]);
      }
      table << "," << fmt(mean_of(v)) << "," << fmt(std_of(v));
    }
    table << "\n";
  }
  table.close();

  std::ofstream curve(out_run.path("similarity_curve.csv"));
  curve << "label,epoch,runs,avg_tanimoto,avg_tanimoto_std\n";
  for (const auto& g : groups) {
    for (const auto& [epoch, v] : g.curve) {
      curve << g.label << "," << epoch << "," << v.size() << "," << fmt(mean_of(v)) << ","
            << fmt(std_of(v)) << "\n";
    }
  }
  curve.close();
  log(ctx) << "report rows " << groups.size() << " from " << runs.size() << " runs\n";
  out_run.record("report", ctx.config.seed, {"report.csv", "similarity_curve.csv"});
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"build-corpus", "pretrain", "train-surrogate",
                                              "build-buffer", "finetune", "generate",
                                              "evaluate",     "report"};
  return names;
}

bool run_command(const std::string& name, const CommandContext& ctx) {
  using Fn = void (*)(const CommandContext&);
  static const std::map<std::string, Fn> table{
      {"build-corpus", &build_corpus}, {"pretrain", &pretrain},
      {"train-surrogate", &train_surrogate}, {"build-buffer", &build_buffer},
      {"finetune", &finetune},         {"generate", &generate},
      {"evaluate", &evaluate},         {"report", &report},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    return false;
  }
  it->second(ctx);
  return true;
}

}  // namespace molspo::harness
