#include "diffgt/numerics/tape.hpp"

#include <algorithm>
#include <cmath>

#include "diffgt/error.hpp"

namespace diffgt {

const Matrix& Var::value() const { return tape_->value(*this); }

const Matrix& Gradients::at(const std::string& name) const {
  const auto it = grads_.find(name);
  if (it == grads_.end()) throw MissingHandleError("no gradient recorded for parameter '" + name + "'");
  return it->second;
}

Var Tape::parameter(const std::string& name, Matrix value) {
  if (params_.count(name)) throw ConfigError("parameter '" + name + "' registered twice");
  nodes_.push_back(Node{std::move(value), {}, {}, true});
  params_[name] = nodes_.size() - 1;
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) throw MissingHandleError("parameter '" + name + "' is not registered");
  return Var(const_cast<Tape*>(this), it->second);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (&in.tape() != this) throw ShapeError("operation mixes variables from different tapes");
    needs = needs || nodes_[in.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : Backward{}, needs});
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(Var v, const Matrix& grad) {
  Node& n = nodes_[v.id()];
  if (!n.requires_grad) return;
  if (n.grad.empty() && !n.value.empty()) {
    n.grad = grad;
  } else {
    n.grad += grad;
  }
}

Gradients Tape::gradient_of(Var loss) {
  if (&loss.tape() != this) throw MissingHandleError("loss was not recorded on this tape");
  if (value(loss).rows() != 1 || value(loss).cols() != 1) {
    throw ShapeError("gradient_of: loss must be 1x1, got " + shape_string(value(loss)));
  }
  for (auto& n : nodes_) n.grad = Matrix();
  if (nodes_[loss.id()].requires_grad) {
    nodes_[loss.id()].grad = Matrix(1, 1, 1.0);
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.backward || n.grad.empty()) continue;
      // The callback may touch other nodes but never reallocates the vector.
      const Matrix g = std::move(n.grad);
      n.backward(*this, n.value, g);
      n.grad = g;
    }
  }
  Gradients out;
  for (const auto& [name, id] : params_) {
    const Node& n = nodes_[id];
    out.grads_[name] = n.grad.empty() ? Matrix(n.value.rows(), n.value.cols()) : n.grad;
  }
  return out;
}

namespace ad {
namespace {

void require_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": " + shape_string(a) + " vs " + shape_string(b));
  }
}

double stable_log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matmul(Var a, Var b) {
  return a.tape().record(diffgt::matmul(a.value(), b.value()), {a, b},
                         [a, b](Tape& tape, const Matrix&, const Matrix& g) {
                           if (tape.requires_grad(a)) tape.accumulate(a, matmul_nt(g, b.value()));
                           if (tape.requires_grad(b)) tape.accumulate(b, matmul_tn(a.value(), g));
                         });
}

Var matmul_nt(Var a, Var b) {
  return a.tape().record(diffgt::matmul_nt(a.value(), b.value()), {a, b},
                         [a, b](Tape& tape, const Matrix&, const Matrix& g) {
                           if (tape.requires_grad(a)) tape.accumulate(a, diffgt::matmul(g, b.value()));
                           if (tape.requires_grad(b)) tape.accumulate(b, matmul_tn(g, a.value()));
                         });
}

Var add(Var a, Var b) {
  require_shape(a.value(), b.value(), "add");
  return a.tape().record(a.value() + b.value(), {a, b},
                         [a, b](Tape& tape, const Matrix&, const Matrix& g) {
                           tape.accumulate(a, g);
                           tape.accumulate(b, g);
                         });
}

Var sub(Var a, Var b) {
  require_shape(a.value(), b.value(), "sub");
  return a.tape().record(a.value() - b.value(), {a, b},
                         [a, b](Tape& tape, const Matrix&, const Matrix& g) {
                           tape.accumulate(a, g);
                           if (tape.requires_grad(b)) tape.accumulate(b, g * -1.0);
                         });
}

Var scale(Var a, double s) {
  return a.tape().record(a.value() * s, {a}, [a, s](Tape& tape, const Matrix&, const Matrix& g) {
    tape.accumulate(a, g * s);
  });
}

Var hadamard(Var a, Var b) {
  return a.tape().record(diffgt::hadamard(a.value(), b.value()), {a, b},
                         [a, b](Tape& tape, const Matrix&, const Matrix& g) {
                           if (tape.requires_grad(a)) tape.accumulate(a, diffgt::hadamard(g, b.value()));
                           if (tape.requires_grad(b)) tape.accumulate(b, diffgt::hadamard(g, a.value()));
                         });
}

Var add_row(Var a, Var row) {
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw ShapeError("add_row: " + shape_string(av) + " + " + shape_string(rv));
  }
  Matrix out = av;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += rv(0, c);
  return a.tape().record(std::move(out), {a, row},
                         [a, row](Tape& tape, const Matrix&, const Matrix& g) {
                           tape.accumulate(a, g);
                           if (tape.requires_grad(row)) {
                             Matrix col_sum(1, g.cols());
                             for (std::size_t r = 0; r < g.rows(); ++r)
                               for (std::size_t c = 0; c < g.cols(); ++c) col_sum(0, c) += g(r, c);
                             tape.accumulate(row, col_sum);
                           }
                         });
}

Var concat_cols(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw ShapeError("concat_cols: " + shape_string(av) + " | " + shape_string(bv));
  }
  const std::size_t ca = av.cols();
  const std::size_t cb = bv.cols();
  Matrix out(av.rows(), ca + cb);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::copy_n(av.row(r).begin(), ca, out.row(r).begin());
    std::copy_n(bv.row(r).begin(), cb, out.row(r).begin() + static_cast<std::ptrdiff_t>(ca));
  }
  return a.tape().record(std::move(out), {a, b},
                         [a, b, ca, cb](Tape& tape, const Matrix&, const Matrix& g) {
                           Matrix ga(g.rows(), ca);
                           Matrix gb(g.rows(), cb);
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             std::copy_n(g.row(r).begin(), ca, ga.row(r).begin());
                             std::copy_n(g.row(r).begin() + static_cast<std::ptrdiff_t>(ca), cb,
                                         gb.row(r).begin());
                           }
                           tape.accumulate(a, ga);
                           tape.accumulate(b, gb);
                         });
}

Var gather_rows(Var a, std::vector<std::size_t> rows) {
  Matrix out = diffgt::gather_rows(a.value(), rows);
  return a.tape().record(std::move(out), {a},
                         [a, rows = std::move(rows)](Tape& tape, const Matrix&, const Matrix& g) {
                           Matrix ga(a.rows(), a.cols());
                           for (std::size_t i = 0; i < rows.size(); ++i) {
                             auto dst = ga.row(rows[i]);
                             auto src = g.row(i);
                             for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                           }
                           tape.accumulate(a, ga);
                         });
}

Var spmm(std::shared_ptr<const SparseMatrix> s, Var x) {
  Matrix out = s->multiply(x.value());
  return x.tape().record(std::move(out), {x},
                         [s = std::move(s), x](Tape& tape, const Matrix&, const Matrix& g) {
                           tape.accumulate(x, s->multiply_transposed(g));
                         });
}

Var softmax_rows(Var a) {
  Matrix out = a.value();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return a.tape().record(std::move(out), {a}, [a](Tape& tape, const Matrix& y, const Matrix& g) {
    Matrix ga(g.rows(), g.cols());
    for (std::size_t r = 0; r < g.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c) = y(r, c) * (g(r, c) - dot);
    }
    tape.accumulate(a, ga);
  });
}

Var row_dot(Var a, Var b) {
  require_shape(a.value(), b.value(), "row_dot");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) dot += av(r, c) * bv(r, c);
    out(r, 0) = dot;
  }
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix&, const Matrix& g) {
    auto scaled = [&g](const Matrix& m) {
      Matrix res = m;
      for (std::size_t r = 0; r < res.rows(); ++r)
        for (double& v : res.row(r)) v *= g(r, 0);
      return res;
    };
    if (tape.requires_grad(a)) tape.accumulate(a, scaled(b.value()));
    if (tape.requires_grad(b)) tape.accumulate(b, scaled(a.value()));
  });
}

Var log_sigmoid(Var a) {
  Matrix out = a.value();
  for (double& v : out.values()) v = stable_log_sigmoid(v);
  return a.tape().record(std::move(out), {a}, [a](Tape& tape, const Matrix&, const Matrix& g) {
    Matrix ga = g;
    auto x = a.value().values();
    auto gv = ga.values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= sigmoid(-x[i]);
    tape.accumulate(a, ga);
  });
}

Var logsumexp_rows(Var a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto row = av.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double v : row) total += std::exp(v - peak);
    out(r, 0) = peak + std::log(total);
  }
  return a.tape().record(std::move(out), {a}, [a](Tape& tape, const Matrix& y, const Matrix& g) {
    const Matrix& av = a.value();
    Matrix ga(av.rows(), av.cols());
    for (std::size_t r = 0; r < av.rows(); ++r)
      for (std::size_t c = 0; c < av.cols(); ++c) ga(r, c) = g(r, 0) * std::exp(av(r, c) - y(r, 0));
    tape.accumulate(a, ga);
  });
}

Var l2_normalize_rows(Var a) {
  constexpr double kFloor = 1e-12;
  const Matrix& av = a.value();
  Matrix out = av;
  std::vector<double> norms(av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double sq = 0.0;
    for (double v : av.row(r)) sq += v * v;
    norms[r] = std::max(std::sqrt(sq), kFloor);
    for (double& v : out.row(r)) v /= norms[r];
  }
  return a.tape().record(std::move(out), {a},
                         [a, norms = std::move(norms)](Tape& tape, const Matrix& y, const Matrix& g) {
                           Matrix ga(g.rows(), g.cols());
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             double dot = 0.0;
                             for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * y(r, c);
                             for (std::size_t c = 0; c < g.cols(); ++c)
                               ga(r, c) = (g(r, c) - y(r, c) * dot) / norms[r];
                           }
                           tape.accumulate(a, ga);
                         });
}

Var sum(Var a) {
  return a.tape().record(Matrix(1, 1, diffgt::sum(a.value())), {a},
                         [a](Tape& tape, const Matrix&, const Matrix& g) {
                           tape.accumulate(a, Matrix(a.rows(), a.cols(), g(0, 0)));
                         });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean of empty matrix");
  return scale(sum(a), 1.0 / n);
}

Var mse(Var a, Var b) {
  require_shape(a.value(), b.value(), "mse");
  const Matrix diff = a.value() - b.value();
  const double n = static_cast<double>(diff.size());
  if (n == 0) throw ShapeError("mse of empty matrices");
  double total = 0.0;
  for (double v : diff.values()) total += v * v;
  return a.tape().record(Matrix(1, 1, total / n), {a, b},
                         [a, b, diff, n](Tape& tape, const Matrix&, const Matrix& g) {
                           const Matrix ga = diff * (2.0 * g(0, 0) / n);
                           tape.accumulate(a, ga);
                           if (tape.requires_grad(b)) tape.accumulate(b, ga * -1.0);
                         });
}

}  // namespace ad
}  // namespace diffgt
