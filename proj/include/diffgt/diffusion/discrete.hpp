#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diffgt/numerics/random.hpp"
#include "diffgt/numerics/sparse.hpp"

namespace diffgt {

/// Two-state edge chain Q = [[1−a, a], [a, 1−a]] where `a` is the probability
/// that an edge state flips in one step (a = 0 leaves the graph unchanged).
struct DiscreteTransition {
  double flip = 0.0;
  std::array<std::array<double, 2>, 2> q{};

  static DiscreteTransition make(double flip_probability);
  /// Row-vector convention: (this then next) = this.q · next.q.
  DiscreteTransition then(const DiscreteTransition& next) const;
};

/// Square symmetric 0/1 matrix stored densely.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  explicit BinaryMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}
  static BinaryMatrix from_adjacency(const SparseMatrix& adjacency);

  std::size_t size() const { return n_; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * n_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint8_t v) { bits_[r * n_ + c] = v; }
  bool is_symmetric() const;
  std::size_t count_ones() const;
  SparseMatrix to_sparse() const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Runs steps 1..t of the edge chain over the strictly upper triangle, drawing
/// each entry's next state from the row of Q selected by its current state,
/// then mirrors the result. `flip_probabilities[s-1]` is the flip probability
/// of step s. The diagonal is left as is.
BinaryMatrix discrete_forward(const BinaryMatrix& adjacency, std::size_t t,
                              std::span<const double> flip_probabilities, RandomSource& rng);

}  // namespace diffgt
