#include "mvp/model/tape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mvp::model {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)

// log(sum(exp(x))) of a row, shifted by its maximum.
double log_sum_exp(const Eigen::RowVectorXd& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

Tape::Var Tape::push(Matrix value, std::function<void()> back) {
  nodes_.push_back({std::move(value), Matrix(), std::move(back), nullptr});
  return {static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Tape::Var Tape::constant(Matrix value) { return push(std::move(value)); }

Tape::Var Tape::param(Parameter& p) {
  if (const auto it = param_ids_.find(&p); it != param_ids_.end()) return {it->second};
  Var v = push(p.value);
  nodes_.back().param = &p;
  param_ids_.emplace(&p, v.id);
  return v;
}

Tape::Var Tape::add(Var a, Var b) {
  Var out = push(value(a) + value(b));
  nodes_.back().back = [this, a, b, out] {
    grad(a) += grad(out);
    grad(b) += grad(out);
  };
  return out;
}

Tape::Var Tape::add_row(Var x, Var row) {
  Var out = push(value(x).rowwise() + value(row).row(0));
  nodes_.back().back = [this, x, row, out] {
    grad(x) += grad(out);
    grad(row) += grad(out).colwise().sum();
  };
  return out;
}

Tape::Var Tape::scale(Var x, double s) {
  Var out = push(value(x) * s);
  nodes_.back().back = [this, x, s, out] { grad(x) += grad(out) * s; };
  return out;
}

Tape::Var Tape::matmul(Var a, Var b) {
  Var out = push(value(a) * value(b));
  nodes_.back().back = [this, a, b, out] {
    const Matrix& g = grad(out);
    grad(a).noalias() += g * value(b).transpose();
    grad(b).noalias() += value(a).transpose() * g;
  };
  return out;
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  Var out = push(value(a) * value(b).transpose());
  nodes_.back().back = [this, a, b, out] {
    const Matrix& g = grad(out);
    grad(a).noalias() += g * value(b);
    grad(b).noalias() += g.transpose() * value(a);
  };
  return out;
}

Tape::Var Tape::gather_rows(Var table, std::vector<std::int32_t> rows) {
  const Matrix& t = value(table);
  Matrix v(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= t.rows()) throw std::out_of_range("row index out of range");
    v.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  }
  Var out = push(std::move(v));
  nodes_.back().back = [this, table, rows = std::move(rows), out] {
    Matrix& g = grad(table);
    const Matrix& go = grad(out);
    for (std::size_t i = 0; i < rows.size(); ++i) g.row(rows[i]) += go.row(static_cast<Eigen::Index>(i));
  };
  return out;
}

Tape::Var Tape::slice_cols(Var x, Eigen::Index start, Eigen::Index count) {
  Var out = push(value(x).middleCols(start, count));
  nodes_.back().back = [this, x, start, count, out] { grad(x).middleCols(start, count) += grad(out); };
  return out;
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  Eigen::Index cols = 0;
  for (Var p : parts) cols += value(p).cols();
  Matrix v(value(parts.front()).rows(), cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    v.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  Var out = push(std::move(v));
  nodes_.back().back = [this, parts, out] {
    Eigen::Index at = 0;
    for (Var p : parts) {
      const Eigen::Index c = value(p).cols();
      grad(p) += grad(out).middleCols(at, c);
      at += c;
    }
  };
  return out;
}

Tape::Var Tape::stack_rows(const std::vector<Var>& blocks) {
  Eigen::Index rows = 0;
  for (Var b : blocks) rows += value(b).rows();
  Matrix v(rows, value(blocks.front()).cols());
  Eigen::Index at = 0;
  for (Var b : blocks) {
    v.middleRows(at, value(b).rows()) = value(b);
    at += value(b).rows();
  }
  Var out = push(std::move(v));
  nodes_.back().back = [this, blocks, out] {
    Eigen::Index at = 0;
    for (Var b : blocks) {
      const Eigen::Index r = value(b).rows();
      grad(b) += grad(out).middleRows(at, r);
      at += r;
    }
  };
  return out;
}

Tape::Var Tape::layer_norm(Var x, Var gamma, Var beta, double eps) {
  const Matrix& xv = value(x);
  const Eigen::Index d = xv.cols();
  Matrix xhat(xv.rows(), d);
  Eigen::VectorXd inv_std(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mean = xv.row(r).mean();
    const double var = (xv.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mean) * inv_std(r);
  }
  Matrix v = (xhat.array().rowwise() * value(gamma).row(0).array()).matrix();
  v.rowwise() += value(beta).row(0);
  Var out = push(std::move(v));
  nodes_.back().back = [this, x, gamma, beta, out, xhat = std::move(xhat), inv_std = std::move(inv_std)] {
    const Matrix& go = grad(out);
    grad(beta) += go.colwise().sum();
    grad(gamma) += (go.array() * xhat.array()).colwise().sum().matrix();
    const Eigen::RowVectorXd g = value(gamma).row(0);
    Matrix& gx = grad(x);
    const double d = static_cast<double>(xhat.cols());
    for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
      const Eigen::RowVectorXd dxhat = go.row(r).cwiseProduct(g);
      const double mean_d = dxhat.mean();
      const double mean_dx = dxhat.dot(xhat.row(r)) / d;
      gx.row(r) += inv_std(r) * (dxhat.array() - mean_d - xhat.row(r).array() * mean_dx).matrix();
    }
  };
  return out;
}

Tape::Var Tape::gelu(Var x) {
  const Matrix& xv = value(x);
  const Matrix inner = (kGeluC * (xv.array() + 0.044715 * xv.array().cube())).matrix();
  const Matrix t = inner.array().tanh().matrix();
  Var out = push((0.5 * xv.array() * (1.0 + t.array())).matrix());
  nodes_.back().back = [this, x, out, t] {
    const auto xv = value(x).array();
    const auto dinner = kGeluC * (1.0 + 3.0 * 0.044715 * xv.square());
    const auto d = 0.5 * (1.0 + t.array()) + 0.5 * xv * (1.0 - t.array().square()) * dinner;
    grad(x) += (grad(out).array() * d).matrix();
  };
  return out;
}

Tape::Var Tape::tanh(Var x) {
  Var out = push(value(x).array().tanh().matrix());
  nodes_.back().back = [this, x, out] {
    grad(x) += (grad(out).array() * (1.0 - value(out).array().square())).matrix();
  };
  return out;
}

Tape::Var Tape::softmax_rows(Var scores, const std::vector<bool>& masked) {
  const Matrix& s = value(scores);
  Matrix p = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (!masked[static_cast<std::size_t>(c)]) m = std::max(m, s(r, c));
    }
    double z = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (!masked[static_cast<std::size_t>(c)]) z += (p(r, c) = std::exp(s(r, c) - m));
    }
    p.row(r) /= z;
  }
  Var out = push(std::move(p));
  nodes_.back().back = [this, scores, out] {
    const Matrix& pv = value(out);
    const Matrix& go = grad(out);
    const Eigen::VectorXd dot = (go.array() * pv.array()).rowwise().sum();
    grad(scores) += (pv.array() * (go.colwise() - dot).array()).matrix();
  };
  return out;
}

Tape::Var Tape::cross_entropy(Var logits, const std::vector<std::int32_t>& targets) {
  const Matrix& z = value(logits);
  const auto n = static_cast<double>(targets.size());
  Matrix probs(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double lse = log_sum_exp(z.row(r));
    loss += lse - z(r, targets[static_cast<std::size_t>(r)]);
    probs.row(r) = (z.row(r).array() - lse).exp().matrix();
  }
  Var out = push(Matrix::Constant(1, 1, loss / n));
  nodes_.back().back = [this, logits, out, targets, n, probs = std::move(probs)] {
    Matrix g = probs;
    for (std::size_t r = 0; r < targets.size(); ++r) g(static_cast<Eigen::Index>(r), targets[r]) -= 1.0;
    grad(logits) += g * (grad(out)(0, 0) / n);
  };
  return out;
}

Tape::Var Tape::sum_squares(Var x) {
  Var out = push(Matrix::Constant(1, 1, value(x).squaredNorm()));
  nodes_.back().back = [this, x, out] { grad(x) += value(x) * (2.0 * grad(out)(0, 0)); };
  return out;
}

Tape::Var Tape::sum(const std::vector<Var>& scalars) {
  double total = 0.0;
  for (Var s : scalars) total += scalar(s);
  Var out = push(Matrix::Constant(1, 1, total));
  nodes_.back().back = [this, scalars, out] {
    for (Var s : scalars) grad(s) += grad(out);
  };
  return out;
}

Tape::Var Tape::contrastive(Var va, Var vb) {
  ContrastiveResult r = contrastive_loss(value(va), value(vb));
  Var out = push(Matrix::Constant(1, 1, r.loss));
  nodes_.back().back = [this, va, vb, out, ga = std::move(r.grad_a), gb = std::move(r.grad_b)] {
    const double g = grad(out)(0, 0);
    grad(va) += ga * g;
    grad(vb) += gb * g;
  };
  return out;
}

void Tape::backward(Var loss) {
  grad(loss)(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0) continue;
    if (n.back) n.back();
    if (n.param) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix::Zero(n.value.rows(), n.value.cols());
      n.param->grad += n.grad;
    }
  }
}

ContrastiveResult contrastive_loss(const Matrix& va, const Matrix& vb, bool with_grad) {
  const Eigen::Index n = va.rows();
  ContrastiveResult r;
  if (with_grad) {
    r.grad_a = Matrix::Zero(va.rows(), va.cols());
    r.grad_b = Matrix::Zero(vb.rows(), vb.cols());
  }
  // Query side q with own side `own` and opposite side `other`.
  auto direction = [&](const Matrix& q, const Matrix& other, Matrix* g_own, Matrix* g_other) {
    const Matrix own_scores = q * q.transpose();
    const Matrix cross_scores = q * other.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      // Logit layout: [positive, own j != i ..., other j != i ...].
      Eigen::RowVectorXd logits(2 * n - 1);
      logits(0) = cross_scores(i, i);
      Eigen::Index k = 1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) logits(k++) = own_scores(i, j);
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) logits(k++) = cross_scores(i, j);
      }
      const double lse = log_sum_exp(logits);
      r.loss += (lse - logits(0)) / static_cast<double>(n);
      if (!g_own) continue;
      Eigen::RowVectorXd w = (logits.array() - lse).exp().matrix() / static_cast<double>(n);
      w(0) -= 1.0 / static_cast<double>(n);
      // d(q_i . x)/dq_i = x and d/dx = q_i.
      g_own->row(i) += w(0) * other.row(i);
      g_other->row(i) += w(0) * q.row(i);
      k = 1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        g_own->row(i) += w(k) * q.row(j);
        g_own->row(j) += w(k) * q.row(i);
        ++k;
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        g_own->row(i) += w(k) * other.row(j);
        g_other->row(j) += w(k) * q.row(i);
        ++k;
      }
    }
  };
  direction(va, vb, with_grad ? &r.grad_a : nullptr, with_grad ? &r.grad_b : nullptr);
  direction(vb, va, with_grad ? &r.grad_b : nullptr, with_grad ? &r.grad_a : nullptr);
  return r;
}

double pair_loss(const Eigen::VectorXd& va, const Eigen::VectorXd& vb, const std::vector<Eigen::VectorXd>& negatives) {
  Eigen::RowVectorXd logits(static_cast<Eigen::Index>(negatives.size()) + 1);
  logits(0) = va.dot(vb);
  for (std::size_t k = 0; k < negatives.size(); ++k) logits(static_cast<Eigen::Index>(k) + 1) = va.dot(negatives[k]);
  return log_sum_exp(logits) - logits(0);
}

}  // namespace mvp::model
