#pragma once

#include <cstddef>
#include <memory>

#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"
#include "diffgt/numerics/sparse.hpp"
#include "diffgt/numerics/tape.hpp"

namespace diffgt {

/// Light graph convolution: (1/(1+L))·Σ_{k=0..L} Āᵏ·X⁰, computed by repeated
/// propagation.
Matrix encode(const SparseMatrix& normalized_adjacency, const Matrix& table, std::size_t layers);

/// Recorded variant for training.
Var encode(const std::shared_ptr<const SparseMatrix>& normalized_adjacency, Var table, std::size_t layers);

/// Xavier-uniform initialisation, bound √(6/(rows+cols)).
Matrix xavier_uniform(std::size_t rows, std::size_t cols, RandomSource& rng);

}  // namespace diffgt
