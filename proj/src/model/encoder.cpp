#include "diffgt/model/encoder.hpp"

#include <cmath>

#include "diffgt/error.hpp"
#include "diffgt/numerics/random.hpp"

namespace diffgt {

Matrix encode(const SparseMatrix& normalized_adjacency, const Matrix& table, std::size_t layers) {
  if (normalized_adjacency.cols() != table.rows()) {
    throw ShapeError("encode: adjacency is " + std::to_string(normalized_adjacency.rows()) + "x" +
                     std::to_string(normalized_adjacency.cols()) + ", table " + shape_string(table));
  }
  Matrix total = table;
  Matrix current = table;
  for (std::size_t k = 0; k < layers; ++k) {
    current = normalized_adjacency.multiply(current);
    total += current;
  }
  return total * (1.0 / static_cast<double>(layers + 1));
}

Var encode(const std::shared_ptr<const SparseMatrix>& normalized_adjacency, Var table, std::size_t layers) {
  Var total = table;
  Var current = table;
  for (std::size_t k = 0; k < layers; ++k) {
    current = ad::spmm(normalized_adjacency, current);
    total = ad::add(total, current);
  }
  return layers == 0 ? total : ad::scale(total, 1.0 / static_cast<double>(layers + 1));
}

Matrix xavier_uniform(std::size_t rows, std::size_t cols, RandomSource& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = (2.0 * rng.uniform() - 1.0) * bound;
  return m;
}

}  // namespace diffgt
