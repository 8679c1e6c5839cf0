#pragma once

#include <chrono>

#include <Eigen/Dense>

#include "rmt/types.hpp"

namespace rmt {

struct EigenReport {
  Spectrum spectrum;
  double residual = 0.0;  // |sum of eigenvalues - trace|, a backward-error proxy
  double elapsed_seconds = 0.0;

  // Flag threshold for the run manifest: relative trace error above 1e-6.
  bool trace_flagged(double norm, int n) const {
    return residual > 1e-6 * std::max(1.0, norm) && n > 0;
  }
};

// Full spectrum through the real Schur decomposition. The real/complex split
// is read off the quasi-triangular block structure: 1x1 blocks are exactly
// real, 2x2 blocks are conjugate pairs. No imaginary-part thresholding is
// involved anywhere, so the count of real eigenvalues is bit-reproducible.
// A 2x2 block whose discriminant turns out nonnegative (possible before
// standardization) is split into two real eigenvalues.
inline EigenReport compute_spectrum(const Eigen::Ref<const MatrixX<double>>& x) {
  if (x.rows() != x.cols()) throw ConfigError("compute_spectrum: matrix must be square");
  if (!x.allFinite()) throw NumericalError("compute_spectrum: matrix has non-finite entries");
  const Index n = x.rows();
  const auto t0 = std::chrono::steady_clock::now();

  EigenReport report;
  report.spectrum.n = n;
  if (n == 0) return report;

  Eigen::RealSchur<MatrixX<double>> schur(x, /*computeU=*/false);
  if (schur.info() != Eigen::Success)
    throw NumericalError("compute_spectrum: real Schur QR iteration did not converge");
  const MatrixX<double>& t = schur.matrixT();

  Index i = 0;
  while (i < n) {
    if (i == n - 1 || t(i + 1, i) == 0.0) {
      report.spectrum.real_eigs.push_back(t(i, i));
      ++i;
    } else {
      const double a = t(i, i), b = t(i, i + 1);
      const double c = t(i + 1, i), d = t(i + 1, i + 1);
      const double mean = 0.5 * (a + d);
      const double half_disc = 0.25 * (a - d) * (a - d) + b * c;
      if (half_disc >= 0.0) {
        const double s = std::sqrt(half_disc);
        report.spectrum.real_eigs.push_back(mean + s);
        report.spectrum.real_eigs.push_back(mean - s);
      } else {
        report.spectrum.complex_pairs.push_back({mean, std::sqrt(-half_disc)});
      }
      i += 2;
    }
  }
  if (!report.spectrum.cardinality_ok())
    throw InvariantError("compute_spectrum: block walk lost eigenvalues");

  double eig_sum = 0.0;
  for (double v : report.spectrum.real_eigs) eig_sum += v;
  for (const ComplexPair& p : report.spectrum.complex_pairs) eig_sum += 2.0 * p.x;
  report.residual = std::abs(eig_sum - x.trace());
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace rmt
