#pragma once

#include <array>

#include "diffgt/numerics/matrix.hpp"

namespace diffgt {

struct TopTwoSvd {
  Matrix projection;      ///< n×2: rows of the input projected on v₁, v₂.
  Matrix right_vectors;   ///< d×2, columns v₁, v₂.
  std::array<double, 2> singular_values;  ///< descending, non-negative.
};

/// Leading two singular triplets via one-sided Jacobi rotations. Each right
/// vector is sign-normalised so its largest-magnitude entry is positive.
/// Throws ShapeError for fewer than two columns and DegenerateInputError for a
/// zero matrix.
TopTwoSvd svd_top2(const Matrix& m);

}  // namespace diffgt
