#include "molspo/lm/autodiff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace molspo::lm {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, nullptr, {}, false, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{{}, &p.value, &p, {}, true, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_[v.index];
  return n.view != nullptr ? *n.view : n.value;
}

Var Tape::record(Matrix value, bool needs_grad, std::function<void(const Matrix&)> back) {
  nodes_.push_back(Node{std::move(value), nullptr, nullptr, {}, needs_grad,
                        needs_grad ? std::move(back) : nullptr});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.index];
  if (!n.needs_grad) {
    return;
  }
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::accumulate_row(Var v, Eigen::Index row, const RowVector& g) {
  Node& n = nodes_[v.index];
  if (!n.needs_grad) {
    return;
  }
  if (n.grad.size() == 0) {
    const Matrix& val = value(v);
    n.grad = Matrix::Zero(val.rows(), val.cols());
  }
  n.grad.row(row) += g;
}

void Tape::backward(Var root, double seed) {
  if (used_) {
    throw std::logic_error("Tape::backward called twice");
  }
  used_ = true;
  if (value(root).size() != 1) {
    throw std::logic_error("Tape::backward needs a scalar root");
  }
  if (!nodes_[root.index].needs_grad) {
    return;
  }
  nodes_[root.index].grad = Matrix::Constant(1, 1, seed);
  for (int i = root.index; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0) {
      continue;
    }
    if (n.param != nullptr) {
      n.param->grad += n.grad;
    } else if (n.back) {
      n.back(n.grad);
    }
  }
}

Var matmul(Tape& t, Var a, Var b) {
  const bool ng = t.needs_grad(a) || t.needs_grad(b);
  return t.record(t.value(a) * t.value(b), ng, [&t, a, b](const Matrix& g) {
    if (t.needs_grad(a)) {
      t.accumulate(a, g * t.value(b).transpose());
    }
    if (t.needs_grad(b)) {
      t.accumulate(b, t.value(a).transpose() * g);
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  const bool ng = t.needs_grad(a) || t.needs_grad(b);
  return t.record(t.value(a) + t.value(b), ng, [&t, a, b](const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var add_row(Tape& t, Var a, Var b) {
  const bool ng = t.needs_grad(a) || t.needs_grad(b);
  Matrix out = t.value(a);
  out.rowwise() += t.value(b).row(0);
  return t.record(std::move(out), ng, [&t, a, b](const Matrix& g) {
    t.accumulate(a, g);
    if (t.needs_grad(b)) {
      t.accumulate(b, g.colwise().sum());
    }
  });
}

Var scale(Tape& t, Var a, double c) {
  return t.record(t.value(a) * c, t.needs_grad(a),
                  [&t, a, c](const Matrix& g) { t.accumulate(a, g * c); });
}

Var gather_rows(Tape& t, Var table, std::span<const int> ids) {
  const Matrix& tab = t.value(table);
  Matrix out(static_cast<Eigen::Index>(ids.size()), tab.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = tab.row(ids[i]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return t.record(std::move(out), t.needs_grad(table),
                  [&t, table, idx = std::move(idx)](const Matrix& g) {
                    for (std::size_t i = 0; i < idx.size(); ++i) {
                      t.accumulate_row(table, idx[i], g.row(static_cast<Eigen::Index>(i)));
                    }
                  });
}

Var leading_rows(Tape& t, Var table, Eigen::Index n) {
  return t.record(t.value(table).topRows(n), t.needs_grad(table),
                  [&t, table, n](const Matrix& g) {
                    const Matrix& tab = t.value(table);
                    Matrix full = Matrix::Zero(tab.rows(), tab.cols());
                    full.topRows(n) = g;
                    t.accumulate(table, full);
                  });
}

void layer_norm_rows(const Matrix& x, const Matrix& gamma, const Matrix& beta,
                     double eps, Matrix& out) {
  out.resize(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const RowVector centered = x.row(r).array() - mean;
    const double inv = 1.0 / std::sqrt(centered.squaredNorm() / n + eps);
    out.row(r) = (centered * inv).cwiseProduct(gamma.row(0)) + beta.row(0);
  }
}

Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps) {
  const Matrix& xv = t.value(x);
  const Eigen::Index rows = xv.rows();
  const double n = static_cast<double>(xv.cols());
  Matrix xhat(rows, xv.cols());
  std::vector<double> inv_std(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = xv.row(r).sum() / n;
    const RowVector centered = xv.row(r).array() - mean;
    const double inv = 1.0 / std::sqrt(centered.squaredNorm() / n + eps);
    inv_std[static_cast<std::size_t>(r)] = inv;
    xhat.row(r) = centered * inv;
  }
  Matrix out = xhat;
  out.array().rowwise() *= t.value(gamma).row(0).array();
  out.rowwise() += t.value(beta).row(0);
  const bool ng = t.needs_grad(x) || t.needs_grad(gamma) || t.needs_grad(beta);
  return t.record(std::move(out), ng,
                  [&t, x, gamma, beta, n, xhat = std::move(xhat),
                   inv_std = std::move(inv_std)](const Matrix& g) {
                    if (t.needs_grad(gamma)) {
                      t.accumulate(gamma, g.cwiseProduct(xhat).colwise().sum());
                    }
                    if (t.needs_grad(beta)) {
                      t.accumulate(beta, g.colwise().sum());
                    }
                    if (!t.needs_grad(x)) {
                      return;
                    }
                    Matrix dx(g.rows(), g.cols());
                    const RowVector gam = t.value(gamma).row(0);
                    for (Eigen::Index r = 0; r < g.rows(); ++r) {
                      const RowVector dxhat = g.row(r).cwiseProduct(gam);
                      const double m1 = dxhat.sum() / n;
                      const double m2 = dxhat.dot(xhat.row(r)) / n;
                      dx.row(r) = (dxhat.array() - m1 - xhat.row(r).array() * m2) *
                                  inv_std[static_cast<std::size_t>(r)];
                    }
                    t.accumulate(x, dx);
                  });
}

double gelu_value(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

Var gelu(Tape& t, Var x) {
  const Matrix& xv = t.value(x);
  Matrix out = xv.unaryExpr([](double v) { return gelu_value(v); });
  return t.record(std::move(out), t.needs_grad(x), [&t, x](const Matrix& g) {
    const Matrix& xv = t.value(x);
    Matrix d = xv.unaryExpr([](double v) {
      const double th = std::tanh(kGeluC * (v + kGeluA * v * v * v));
      return 0.5 * (1.0 + th) +
             0.5 * v * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * kGeluA * v * v);
    });
    t.accumulate(x, g.cwiseProduct(d));
  });
}

Var attention(Tape& t, Var qkv, int heads, bool causal) {
  const Matrix& in = t.value(qkv);
  const Eigen::Index n = in.rows();
  const Eigen::Index d = in.cols() / 3;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix out(n, d);
  std::vector<Matrix> probs(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const auto q = in.middleCols(h * dh, dh);
    const auto k = in.middleCols(d + h * dh, dh);
    const auto v = in.middleCols(2 * d + h * dh, dh);
    Matrix s = (q * k.transpose()) * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index visible = causal ? i + 1 : n;
      const double mx = s.row(i).head(visible).maxCoeff();
      double z = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double e = j < visible ? std::exp(s(i, j) - mx) : 0.0;
        s(i, j) = e;
        z += e;
      }
      s.row(i) /= z;
    }
    out.middleCols(h * dh, dh) = s * v;
    probs[static_cast<std::size_t>(h)] = std::move(s);
  }
  return t.record(std::move(out), t.needs_grad(qkv),
                  [&t, qkv, heads, d, dh, scale, probs = std::move(probs)](const Matrix& g) {
                    const Matrix& in = t.value(qkv);
                    Matrix dqkv(in.rows(), in.cols());
                    for (int h = 0; h < heads; ++h) {
                      const Matrix& p = probs[static_cast<std::size_t>(h)];
                      const auto q = in.middleCols(h * dh, dh);
                      const auto k = in.middleCols(d + h * dh, dh);
                      const auto v = in.middleCols(2 * d + h * dh, dh);
                      const auto go = g.middleCols(h * dh, dh);
                      const Matrix dp = go * v.transpose();
                      Matrix ds = p.cwiseProduct(dp);
                      const Eigen::VectorXd rowsum = ds.rowwise().sum();
                      ds -= p.cwiseProduct(rowsum.replicate(1, p.cols()));
                      ds *= scale;
                      dqkv.middleCols(h * dh, dh) = ds * k;
                      dqkv.middleCols(d + h * dh, dh) = ds.transpose() * q;
                      dqkv.middleCols(2 * d + h * dh, dh) = p.transpose() * go;
                    }
                    t.accumulate(qkv, dqkv);
                  });
}

Var dropout(Tape& t, Var x, double rate, Rng& rng) {
  if (rate <= 0.0) {
    return x;
  }
  const Matrix& xv = t.value(x);
  Matrix mask(xv.rows(), xv.cols());
  const double keep = 1.0 - rate;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
  }
  Matrix out = xv.cwiseProduct(mask);
  return t.record(std::move(out), t.needs_grad(x), [&t, x, mask = std::move(mask)](const Matrix& g) {
    t.accumulate(x, g.cwiseProduct(mask));
  });
}

Var mean_rows(Tape& t, Var x) {
  const Matrix& xv = t.value(x);
  const double n = static_cast<double>(xv.rows());
  return t.record(xv.colwise().sum() / n, t.needs_grad(x), [&t, x, n](const Matrix& g) {
    const Matrix& xv = t.value(x);
    t.accumulate(x, g.replicate(xv.rows(), 1) / n);
  });
}

RowVector log_softmax(const RowVector& logits) {
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits.array() - lse;
}

Var cross_entropy(Tape& t, Var logits, std::span<const Eigen::Index> rows,
                  std::span<const int> targets) {
  if (rows.size() != targets.size()) {
    throw std::invalid_argument("cross_entropy: rows/targets size mismatch");
  }
  const Matrix& lv = t.value(logits);
  double total = 0.0;
  Matrix dlogits = Matrix::Zero(lv.rows(), lv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RowVector lp = log_softmax(lv.row(rows[i]));
    total -= lp(targets[i]);
    dlogits.row(rows[i]) += lp.array().exp().matrix();
    dlogits(rows[i], targets[i]) -= 1.0;
  }
  return t.record(Matrix::Constant(1, 1, total), t.needs_grad(logits),
                  [&t, logits, dlogits = std::move(dlogits)](const Matrix& g) {
                    t.accumulate(logits, dlogits * g(0, 0));
                  });
}

Var squared_error(Tape& t, Var a, const Matrix& target) {
  const Matrix diff = t.value(a) - target;
  return t.record(Matrix::Constant(1, 1, diff.squaredNorm()), t.needs_grad(a),
                  [&t, a, diff](const Matrix& g) { t.accumulate(a, diff * (2.0 * g(0, 0))); });
}

}  // namespace molspo::lm
