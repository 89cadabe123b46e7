#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/sparse.hpp"

namespace diffgt {

class Tape;

/// Handle to a recorded value. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Per-parameter gradients keyed by handle name.
class Gradients {
 public:
  const Matrix& at(const std::string& name) const;
  bool contains(const std::string& name) const { return grads_.count(name) != 0; }
  const std::map<std::string, Matrix>& all() const { return grads_; }

 private:
  friend class Tape;
  std::map<std::string, Matrix> grads_;
};

/// Records a computation over matrices and replays it backwards. Parameters
/// are registered under unique names; everything else is an intermediate or a
/// constant. Single-owner, not thread-safe.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& out_value, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var parameter(const std::string& name, Matrix value);
  Var constant(Matrix value);

  /// Handle of a registered parameter; MissingHandleError otherwise.
  Var param(const std::string& name) const;
  bool has_param(const std::string& name) const { return params_.count(name) != 0; }

  const Matrix& value(Var v) const { return nodes_[v.id()].value; }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Exact reverse pass from a 1×1 loss. Every registered parameter receives a
  /// gradient of its own shape (zeros when the loss does not depend on it).
  Gradients gradient_of(Var loss);

  // Used by the differentiable operations below.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward backward);
  void accumulate(Var v, const Matrix& grad);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> params_;
};

namespace ad {

Var matmul(Var a, Var b);
/// a·bᵀ
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
Var hadamard(Var a, Var b);
/// Adds a 1×c row to every row of a.
Var add_row(Var a, Var row);
Var concat_cols(Var a, Var b);
Var gather_rows(Var a, std::vector<std::size_t> rows);
/// Constant sparse operator applied on the left.
Var spmm(std::shared_ptr<const SparseMatrix> s, Var x);
Var softmax_rows(Var a);
/// n×1 column of row-wise dot products.
Var row_dot(Var a, Var b);
Var log_sigmoid(Var a);
/// n×1 column of row-wise log-sum-exp.
Var logsumexp_rows(Var a);
Var l2_normalize_rows(Var a);
Var sum(Var a);
Var mean(Var a);
/// Mean of squared entry differences.
Var mse(Var a, Var b);

}  // namespace ad
}  // namespace diffgt
