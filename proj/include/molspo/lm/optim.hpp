#pragma once

#include <span>
#include <vector>

#include "molspo/lm/autodiff.hpp"

namespace molspo::lm {

struct AdamConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are created on the first step and
/// keyed by parameter position, so the same parameter list must be passed
/// every time.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) { }

  void step(std::span<Parameter> params);
  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

/// Global L2 norm of all gradients.
double grad_norm(std::span<const Parameter> params);
/// Rescales gradients so their global norm is at most max_norm; returns the
/// norm before clipping. No-op when max_norm <= 0.
double clip_grad_norm(std::span<Parameter> params, double max_norm);

}  // namespace molspo::lm
