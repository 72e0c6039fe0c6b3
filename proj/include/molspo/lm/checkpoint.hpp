#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "molspo/lm/autodiff.hpp"
#include "molspo/lm/transformer.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::lm {

/// Versioned container: header, kind, key-value config, the tokenizer
/// vocabulary text, a tensor manifest, then raw little-endian doubles.
struct Checkpoint {
  std::string kind;
  std::map<std::string, std::string> config;
  std::string vocabulary;
  std::vector<Parameter> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws LmError(kCheckpointNotFound) or LmError(kBadCheckpoint).
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies tensor values into `dst`, requiring matching names and shapes.
void assign_parameters(std::vector<Parameter>& dst, const std::vector<Parameter>& src);

struct LoadedPolicy {
  tokenizer::Vocabulary vocab;
  PolicyModel model;
};

void save_policy(const std::filesystem::path& path, const PolicyModel& model,
                 const tokenizer::Vocabulary& vocab);
LoadedPolicy load_policy(const std::filesystem::path& path);

}  // namespace molspo::lm
