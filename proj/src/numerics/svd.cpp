#include "diffgt/numerics/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "diffgt/error.hpp"

namespace diffgt {

TopTwoSvd svd_top2(const Matrix& m) {
  if (m.cols() < 2) throw ShapeError("svd_top2 needs at least 2 columns, got " + shape_string(m));
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (frobenius_norm(m) == 0.0) throw DegenerateInputError("svd_top2: rank-0 input");

  // Work column-major: u holds the columns of m being orthogonalised.
  std::vector<std::vector<double>> u(d, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) u[c][r] = m(r, c);
  Matrix v = Matrix::identity(d);

  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += u[p][i] * u[p][i];
          beta += u[q][i] * u[q][i];
          gamma += u[p][i] * u[q][i];
        }
        if (std::abs(gamma) <= kTol * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double up = u[p][i];
          const double uq = u[q][i];
          u[p][i] = c * up - s * uq;
          u[q][i] = s * up + c * uq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(d);
  for (std::size_t c = 0; c < d; ++c) {
    double sq = 0.0;
    for (double x : u[c]) sq += x * x;
    sigma[c] = std::sqrt(sq);
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&sigma](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  TopTwoSvd out{Matrix(n, 2), Matrix(d, 2), {sigma[order[0]], sigma[order[1]]}};
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t src = order[k];
    std::size_t peak = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (std::abs(v(i, src)) > std::abs(v(peak, src))) peak = i;
    const double sign = v(peak, src) < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < d; ++i) out.right_vectors(i, k) = sign * v(i, src);
  }
  out.projection = matmul(m, out.right_vectors);
  return out;
}

}  // namespace diffgt
