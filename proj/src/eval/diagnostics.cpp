#include "diffgt/eval/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "diffgt/error.hpp"
#include "diffgt/numerics/svd.hpp"

namespace diffgt {
namespace {

constexpr double kRidge = 1e-6;

}  // namespace

FisherRatio fisher_ratio(const Matrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) throw ShapeError("fisher_ratio: one label per row required");
  const std::size_t d = x.cols();
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (labels[r] >= 0) classes[labels[r]].push_back(r);
  if (classes.size() < 2) throw DegenerateInputError("fisher_ratio needs at least two classes");
  for (const auto& [label, rows] : classes) {
    if (rows.size() < 2) throw DegenerateInputError("class " + std::to_string(label) + " has fewer than two rows");
  }

  std::vector<double> overall(d, 0.0);
  std::size_t total = 0;
  for (const auto& [_, rows] : classes) {
    for (std::size_t r : rows)
      for (std::size_t c = 0; c < d; ++c) overall[c] += x(r, c);
    total += rows.size();
  }
  for (double& v : overall) v /= static_cast<double>(total);

  double between = 0.0;
  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& [_, rows] : classes) {
    std::vector<double> mean(d, 0.0);
    for (std::size_t r : rows)
      for (std::size_t c = 0; c < d; ++c) mean[c] += x(r, c);
    for (double& v : mean) v /= static_cast<double>(rows.size());
    for (std::size_t c = 0; c < d; ++c) between += static_cast<double>(rows.size()) * std::pow(mean[c] - overall[c], 2);
    Eigen::VectorXd dev(static_cast<Eigen::Index>(d));
    for (std::size_t r : rows) {
      for (std::size_t c = 0; c < d; ++c) dev(static_cast<Eigen::Index>(c)) = x(r, c) - mean[c];
      within.noalias() += dev * dev.transpose();
    }
  }

  FisherRatio out;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(within, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  double within_trace = within.trace();
  if (largest == 0.0 || smallest <= largest * 1e-12) {
    within_trace += kRidge * static_cast<double>(d);
    out.ridge_applied = true;
  }
  out.value = between / within_trace;
  return out;
}

SnrCurve snr_curve(const Matrix& x0, std::span<const int> labels, const NoiseSchedule& schedule, NoiseMode mode,
                   std::span<const std::size_t> steps, RandomSource& rng) {
  SnrCurve curve;
  curve.mode = mode;
  for (std::size_t t : steps) {
    const FisherRatio f =
        t == 0 ? fisher_ratio(x0, labels) : fisher_ratio(forward_diffuse(x0, t, schedule, mode, rng).x_t, labels);
    curve.steps.push_back(t);
    curve.snr.push_back(f.value);
    curve.ridge_applied = curve.ridge_applied || f.ridge_applied;
  }
  return curve;
}

std::string snr_to_csv(std::span<const SnrCurve> curves) {
  std::ostringstream out;
  out << std::setprecision(17) << "step";
  for (const auto& c : curves) out << ',' << to_string(c.mode) << (c.ridge_applied ? "(ridge)" : "");
  out << '\n';
  if (curves.empty()) return out.str();
  for (std::size_t i = 0; i < curves.front().steps.size(); ++i) {
    out << curves.front().steps[i];
    for (const auto& c : curves) out << ',' << c.snr.at(i);
    out << '\n';
  }
  return out.str();
}

double SvdExport::anisotropy() const {
  return sigma2 == 0.0 ? std::numeric_limits<double>::infinity() : sigma1 / sigma2;
}

SvdExport svd_export(const Matrix& embeddings, std::span<const int> labels) {
  if (labels.size() != embeddings.rows()) throw ShapeError("svd_export: one label per row required");
  const TopTwoSvd svd = svd_top2(embeddings);
  return SvdExport{svd.projection, std::vector<int>(labels.begin(), labels.end()), svd.singular_values[0],
                   svd.singular_values[1]};
}

std::string svd_to_csv(const SvdExport& e) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# sigma1=" << e.sigma1 << ",sigma2=" << e.sigma2 << ",anisotropy=" << e.anisotropy() << '\n';
  out << "x,y,label\n";
  for (std::size_t r = 0; r < e.points.rows(); ++r) out << e.points(r, 0) << ',' << e.points(r, 1) << ',' << e.labels[r] << '\n';
  return out.str();
}

LabelledPoints anisotropic_clusters(std::size_t points, std::size_t dim, RandomSource& rng) {
  if (dim < 2) throw ShapeError("anisotropic_clusters needs dim >= 2");
  constexpr int kClasses = 3;
  // Each cluster is stretched along its own axis and sits in its own orthant:
  // on every coordinate exactly one of the three centres is positive.
  Matrix centres(kClasses, dim);
  for (int k = 0; k < kClasses; ++k)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t kk = static_cast<std::size_t>(k);
      const double magnitude = 0.5 + 0.25 * static_cast<double>((c + kk * 5) % 7);
      centres(k, c) = (c + kk) % kClasses == 0 ? magnitude : -magnitude;
    }

  LabelledPoints out{Matrix(points, dim), std::vector<int>(points)};
  for (std::size_t r = 0; r < points; ++r) {
    const int k = static_cast<int>(r % kClasses);
    out.labels[r] = k;
    const std::size_t axis = (static_cast<std::size_t>(k) + kClasses) % dim;
    for (std::size_t c = 0; c < dim; ++c) {
      const double spread = c == axis ? 1.0 : 0.1;
      out.x(r, c) = centres(k, c) + spread * rng.normal();
    }
  }
  return out;
}

}  // namespace diffgt
