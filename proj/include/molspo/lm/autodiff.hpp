#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "molspo/common/rng.hpp"

namespace molspo::lm {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) { }
  void zero_grad() { grad.setZero(); }
};

/// Handle to a value recorded on a Tape.
struct Var {
  int index = -1;
};

/// Reverse-mode recorder. Every op appends a node holding its value and a
/// closure that pushes the node's gradient to its inputs. Parameter leaves
/// reference the parameter storage directly and receive their gradient
/// when backward() runs.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var parameter(Parameter& p);

  const Matrix& value(Var v) const;
  /// Gradient after backward(); zero-sized if nothing flowed into v.
  const Matrix& grad(Var v) const { return nodes_[v.index].grad; }
  bool needs_grad(Var v) const { return nodes_[v.index].needs_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(root) = seed for a 1x1 root, propagates, then adds the
  /// result into every parameter touched. Call at most once per tape.
  void backward(Var root, double seed = 1.0);

  /// For op implementations: records a node. `back` receives the node's
  /// gradient and must add into inputs through accumulate().
  Var record(Matrix value, bool needs_grad, std::function<void(const Matrix&)> back);
  /// Adds `g` into the gradient of `v`, allocating it on first use.
  void accumulate(Var v, const Matrix& g);
  /// Same, restricted to one row.
  void accumulate_row(Var v, Eigen::Index row, const RowVector& g);

 private:
  struct Node {
    Matrix value;
    const Matrix* view = nullptr;
    Parameter* param = nullptr;
    Matrix grad;
    bool needs_grad = false;
    std::function<void(const Matrix&)> back;
  };
  std::vector<Node> nodes_;
  bool used_ = false;
};

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
/// a (n x m) plus row vector b (1 x m) on every row.
Var add_row(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double c);
/// Rows of `table` selected by ids.
Var gather_rows(Tape& t, Var table, std::span<const int> ids);
/// First `n` rows of `table`.
Var leading_rows(Tape& t, Var table, Eigen::Index n);
Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps = 1e-5);
/// tanh approximation.
Var gelu(Tape& t, Var x);
/// Multi-head scaled dot-product attention on a packed [q | k | v] input of
/// width 3d; returns the concatenated head outputs (n x d).
Var attention(Tape& t, Var qkv, int heads, bool causal);
/// Inverted dropout; identity when rate is 0.
Var dropout(Tape& t, Var x, double rate, Rng& rng);
Var mean_rows(Tape& t, Var x);
/// Sum over rows r of -log softmax(logits[r])[target[r]]; 1x1.
Var cross_entropy(Tape& t, Var logits, std::span<const Eigen::Index> rows,
                  std::span<const int> targets);
/// (a - target)^2 summed; 1x1.
Var squared_error(Tape& t, Var a, const Matrix& target);

// Shared forward kernels; also used by the cached inference path.
double gelu_value(double x);
void layer_norm_rows(const Matrix& x, const Matrix& gamma, const Matrix& beta,
                     double eps, Matrix& out);
/// Numerically stable log-softmax of one row.
RowVector log_softmax(const RowVector& logits);

}  // namespace molspo::lm
