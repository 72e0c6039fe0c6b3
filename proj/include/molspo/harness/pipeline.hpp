#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "molspo/harness/config.hpp"
#include "molspo/harness/evaluate.hpp"
#include "molspo/harness/run_dir.hpp"

namespace molspo::harness {

/// Inputs shared by every pipeline command.
struct CommandContext {
  PipelineConfig config;
  std::filesystem::path run_dir;
  /// generate: policy to sample from; defaults to finetuned.ckpt.
  std::optional<std::filesystem::path> checkpoint;
  /// report: run directories to aggregate; defaults to run_dir alone.
  std::vector<std::filesystem::path> runs;
  std::ostream* log = nullptr;
};

// Each command reads its inputs from the run directory, writes its outputs
// there together with a config snapshot, and records them in the manifest.

/// corpus_train.tsv, corpus_valid.tsv, vocab.txt
void build_corpus(const CommandContext& ctx);
/// policy.ckpt, pretrain_loss.csv, checkpoints/pretrain/epoch_<n>.ckpt
void pretrain(const CommandContext& ctx);
/// surrogate.ckpt, surrogate_report.csv
void train_surrogate(const CommandContext& ctx);
/// scored.csv, buffer.csv
void build_buffer(const CommandContext& ctx);
/// metrics.csv, similarity.csv, finetuned.ckpt, checkpoints/spo/epoch_<n>.ckpt
void finetune(const CommandContext& ctx);
/// generations.csv
void generate(const CommandContext& ctx);
/// evaluation.csv
void evaluate(const CommandContext& ctx);
/// report.csv, similarity_curve.csv
void report(const CommandContext& ctx);

/// Dispatch by CLI name. Returns false for an unknown command.
bool run_command(const std::string& name, const CommandContext& ctx);
const std::vector<std::string>& command_names();

/// Critic suite as configured: fragment table fitted on the molecule file
/// and docking from the mock or the run's surrogate.ckpt.
critics::CriticSuite make_suite(const PipelineConfig& config, const RunDirectory& run);

/// Rows of generations.csv (original,generated,complete); incomplete
/// generations come back with an empty generated string.
std::vector<GeneratedPair> load_generations(const std::filesystem::path& path);

}  // namespace molspo::harness
