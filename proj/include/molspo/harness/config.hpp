#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "molspo/critics/reward.hpp"
#include "molspo/harness/critics_setup.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/spo/finetune.hpp"
#include "molspo/surrogate/surrogate.hpp"

namespace molspo::harness {

/// Flat `key = value` text; `#` starts a comment. Later keys override
/// earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  /// Throws HarnessError(kMissingArtifact) if the file is absent.
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted by key.
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> values_;
};

enum class DockingSource : std::uint8_t { kMock, kSurrogate };

/// Every tunable of the pipeline. Defaults follow the module defaults;
/// smoke() is the small profile used for quick end-to-end runs.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string label = "spo";
  std::filesystem::path molecules = "data/molecules.smi";

  int corpus_pairs = 1000;
  double train_fraction = 0.9;
  int vocab_size = 512;

  lm::ModelConfig model;
  int pretrain_epochs = 10;
  int pretrain_batch = 24;
  double pretrain_lr = 5e-5;
  double lambda_mix = 0.5;
  double pretrain_clip = 1.0;

  std::filesystem::path surrogate_data;  // smiles,docking_score CSV
  surrogate::SurrogateConfig surrogate;
  int surrogate_epochs = 30;
  int surrogate_batch = 16;
  double surrogate_lr = 1e-3;

  DockingSource docking = DockingSource::kMock;
  /// Buffer candidates: the pretrain pairs' molecules, or the whole file.
  bool buffer_from_corpus = false;
  int buffer_size = 256;
  double buffer_lo = -14.0;
  double buffer_hi = -6.0;

  spo::SpoConfig spo;
  bool save_epoch_checkpoints = true;

  critics::CriticSpecs critics = desk_critic_specs();
  std::optional<double> similarity_filter;

  static PipelineConfig smoke();

  /// Unknown keys and malformed values throw HarnessError(kUsage).
  static PipelineConfig from(const KeyValueConfig& kv, PipelineConfig base);
  KeyValueConfig to_kv() const;
  void validate() const;
};

}  // namespace molspo::harness
