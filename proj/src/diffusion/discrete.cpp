#include "diffgt/diffusion/discrete.hpp"

#include <string>

#include "diffgt/error.hpp"

namespace diffgt {

DiscreteTransition DiscreteTransition::make(double flip_probability) {
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw ConfigError("flip probability " + std::to_string(flip_probability) + " outside [0, 1]");
  }
  DiscreteTransition d;
  d.flip = flip_probability;
  d.q = {{{1.0 - flip_probability, flip_probability}, {flip_probability, 1.0 - flip_probability}}};
  return d;
}

DiscreteTransition DiscreteTransition::then(const DiscreteTransition& next) const {
  DiscreteTransition out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out.q[i][j] = q[i][0] * next.q[0][j] + q[i][1] * next.q[1][j];
  out.flip = out.q[0][1];
  return out;
}

BinaryMatrix BinaryMatrix::from_adjacency(const SparseMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("adjacency must be square");
  BinaryMatrix out(adjacency.rows());
  for (std::size_t r = 0; r < adjacency.rows(); ++r)
    for (std::size_t k = adjacency.row_ptr()[r]; k < adjacency.row_ptr()[r + 1]; ++k)
      if (adjacency.values()[k] != 0.0) out.set(r, adjacency.col_idx()[k], 1);
  return out;
}

bool BinaryMatrix::is_symmetric() const {
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = r + 1; c < n_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) return false;
  return true;
}

std::size_t BinaryMatrix::count_ones() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

SparseMatrix BinaryMatrix::to_sparse() const {
  std::vector<Triplet> entries;
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c)
      if ((*this)(r, c)) entries.push_back({r, c, 1.0});
  return SparseMatrix::from_triplets(n_, n_, std::move(entries));
}

BinaryMatrix discrete_forward(const BinaryMatrix& adjacency, std::size_t t,
                              std::span<const double> flip_probabilities, RandomSource& rng) {
  if (t > flip_probabilities.size()) {
    throw StepError("discrete diffusion to step " + std::to_string(t) + " with only " +
                    std::to_string(flip_probabilities.size()) + " transition probabilities");
  }
  BinaryMatrix state = adjacency;
  const std::size_t n = state.size();
  for (std::size_t step = 1; step <= t; ++step) {
    const DiscreteTransition tr = DiscreteTransition::make(flip_probabilities[step - 1]);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) {
        // One-hot state times Q gives the next-state distribution.
        const std::uint8_t s = state(r, c);
        const double p_one = (s == 0 ? 1.0 : 0.0) * tr.q[0][1] + (s == 1 ? 1.0 : 0.0) * tr.q[1][1];
        state.set(r, c, rng.uniform() < p_one ? 1 : 0);
      }
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c) state.set(c, r, state(r, c));
  return state;
}

}  // namespace diffgt
