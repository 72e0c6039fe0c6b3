#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "molspo/common/rng.hpp"
#include "molspo/lm/autodiff.hpp"

namespace molspo::lm {

struct ModelConfig {
  int layers = 4;
  int heads = 4;
  int dim = 128;
  int context = 256;
  int vocab = 512;
  double dropout = 0.0;
  /// Standard deviation of the weight initialization.
  double init_scale = 0.02;

  /// Throws LmError(kBadConfig).
  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static ModelConfig from_map(const std::map<std::string, std::string>& kv);
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Pre-LN transformer stack with learned absolute positions. `causal`
/// selects decoder (masked) or encoder attention. Output head is not part
/// of the stack; callers add their own.
class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(const ModelConfig& config, bool causal, std::vector<Parameter>& params,
                   Rng& init);

  /// Final-norm hidden states, n x dim. Throws LmError(kContextOverflow).
  Var forward(Tape& t, std::vector<Parameter>& params, std::span<const int> ids,
              Rng* dropout_rng) const;

  const ModelConfig& config() const { return config_; }
  bool causal() const { return causal_; }

  struct Block {
    int ln1_g, ln1_b, w_qkv, b_qkv, w_out, b_out;
    int ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
  };
  const std::vector<Block>& blocks() const { return blocks_; }
  int token_embedding() const { return tok_; }
  int position_embedding() const { return pos_; }
  int final_gamma() const { return lnf_g_; }
  int final_beta() const { return lnf_b_; }

 private:
  ModelConfig config_;
  bool causal_ = true;
  int tok_ = -1, pos_ = -1, lnf_g_ = -1, lnf_b_ = -1;
  std::vector<Block> blocks_;
};

/// Appends a parameter initialized N(0, stddev); zeros when stddev is 0,
/// ones when stddev is negative (norm gains).
int add_parameter(std::vector<Parameter>& params, std::string name, int rows, int cols,
                  double stddev, Rng& init);

/// Causal language model: stack plus an untied projection to the vocabulary.
class PolicyModel {
 public:
  PolicyModel(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return stack_.config(); }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  /// Logits n x vocab. Dropout applies only when dropout_rng is non-null.
  Var forward(Tape& t, std::span<const int> ids, Rng* dropout_rng = nullptr);
  /// Inference-only logits without recording gradients.
  Matrix logits(std::span<const int> ids) const;

  void zero_grad();

  /// Incremental decoding with cached keys and values.
  class Session {
   public:
    explicit Session(const PolicyModel& model);
    /// Feeds one token; returns next-token logits.
    RowVector step(int token);
    /// Feeds a sequence; returns logits after the last token.
    RowVector feed(std::span<const int> ids);
    int length() const { return length_; }

   private:
    const PolicyModel& model_;
    std::vector<Matrix> keys_;
    std::vector<Matrix> values_;
    int length_ = 0;
  };

 private:
  friend class Session;
  std::vector<Parameter> params_;
  TransformerStack stack_;
  int head_ = -1;
};

}  // namespace molspo::lm
