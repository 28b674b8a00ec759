#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mvp::model {

using Matrix = Eigen::MatrixXd;

/// A trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

/// Reverse-mode automatic differentiation over dense matrices. Operations
/// record a closure that propagates the output gradient to the inputs;
/// backward() replays them in reverse order.
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  Var constant(Matrix value);
  /// Each parameter enters the tape once; backward() adds into Parameter::grad.
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  double scalar(Var v) const { return value(v)(0, 0); }

  Var add(Var a, Var b);
  Var add_row(Var x, Var row);  // broadcast a 1xk row over every row of x
  Var scale(Var x, double s);
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var gather_rows(Var table, std::vector<std::int32_t> rows);
  Var slice_cols(Var x, Eigen::Index start, Eigen::Index count);
  Var concat_cols(const std::vector<Var>& parts);
  Var stack_rows(const std::vector<Var>& blocks);  // vertical concatenation
  Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
  Var gelu(Var x);  // tanh approximation
  Var tanh(Var x);
  /// Row-wise softmax; columns flagged in `masked` get probability zero.
  Var softmax_rows(Var scores, const std::vector<bool>& masked);
  /// Mean over rows of -log softmax(logits)[target], log-sum-exp stabilized.
  Var cross_entropy(Var logits, const std::vector<std::int32_t>& targets);
  Var sum_squares(Var x);
  Var sum(const std::vector<Var>& scalars);
  /// Symmetric multi-view contrastive loss of aligned rows va[i], vb[i];
  /// see contrastive_loss() for the definition.
  Var contrastive(Var va, Var vb);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every parameter.
  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> back;
    Parameter* param = nullptr;
  };

  Var push(Matrix value, std::function<void()> back = {});
  Matrix& grad(Var v);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_ids_;
};

/// Value and gradients of the contrastive objective. For each i and both
/// directions (a->b, b->a) the query scores its positive against the n-1
/// other rows of its own side and the n-1 other rows of the opposite side:
///   l = -log( e^{q.p} / (e^{q.p} + sum_k e^{q.k}) ),
/// and the loss is the sum of both directions averaged over i.
struct ContrastiveResult {
  double loss = 0.0;
  Matrix grad_a;
  Matrix grad_b;
};

ContrastiveResult contrastive_loss(const Matrix& va, const Matrix& vb, bool with_grad = true);

/// Contrastive loss of one positive pair against an explicit negative list,
/// stabilized by subtracting the largest logit.
double pair_loss(const Eigen::VectorXd& va, const Eigen::VectorXd& vb, const std::vector<Eigen::VectorXd>& negatives);

}  // namespace mvp::model
