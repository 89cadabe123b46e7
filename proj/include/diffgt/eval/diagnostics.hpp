#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "diffgt/diffusion/forward.hpp"
#include "diffgt/diffusion/schedule.hpp"
#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/random.hpp"

namespace diffgt {

struct FisherRatio {
  double value = 0.0;
  bool ridge_applied = false;
};

/// trace(S_b) / trace(S_w) of the rows of `x` grouped by `labels`; rows with a
/// negative label are ignored. When S_w is singular a ridge of 1e-6·I is
/// added to it and flagged. Throws DegenerateInputError unless there are at
/// least two classes with at least two rows each.
FisherRatio fisher_ratio(const Matrix& x, std::span<const int> labels);

struct SnrCurve {
  NoiseMode mode = NoiseMode::kIsotropic;
  std::vector<std::size_t> steps;
  std::vector<double> snr;
  bool ridge_applied = false;  ///< set when any step needed the ridge
};

/// Fisher ratio of x_t at each requested step. Step 0 means the clean x₀
/// (ᾱ₀ = 1); the other steps are diffused with the given noise mode.
SnrCurve snr_curve(const Matrix& x0, std::span<const int> labels, const NoiseSchedule& schedule, NoiseMode mode,
                   std::span<const std::size_t> steps, RandomSource& rng);

/// `step,<mode>...` columns for curves measured on identical steps.
std::string snr_to_csv(std::span<const SnrCurve> curves);

struct SvdExport {
  Matrix points;  ///< n×2 projection on the top two right singular vectors
  std::vector<int> labels;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  /// σ₁/σ₂ (infinite when σ₂ = 0).
  double anisotropy() const;
};

SvdExport svd_export(const Matrix& embeddings, std::span<const int> labels);

/// `# sigma1=…,sigma2=…,anisotropy=…` then `x,y,label` rows.
std::string svd_to_csv(const SvdExport& e);

/// Three elongated Gaussian clusters of `points` rows in `dim` dimensions,
/// labelled 0..2 and centred away from the origin.
struct LabelledPoints {
  Matrix x;
  std::vector<int> labels;
};
LabelledPoints anisotropic_clusters(std::size_t points, std::size_t dim, RandomSource& rng);

}  // namespace diffgt
