#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "rmt/ensembles.hpp"
#include "rmt/partial_schur.hpp"
#include "rmt/spectrum.hpp"

// Property suite for the partial Schur decompositions, shared by the
// `schur-check` CLI subcommand and the acceptance tests: reconstruction,
// orthogonality, block-eigenvalue consistency, y^2 = bc, and the Jacobian
// degeneracy identities, all on sampled Ginibre matrices.

namespace rmt {

namespace detail {

inline std::vector<std::complex<double>> to_complex_list(const Spectrum& s) {
  std::vector<std::complex<double>> all;
  for (double v : s.real_eigs) all.emplace_back(v, 0.0);
  for (const ComplexPair& p : s.complex_pairs) {
    all.emplace_back(p.x, p.y);
    all.emplace_back(p.x, -p.y);
  }
  return all;
}

// Greedy nearest matching; returns the largest pairing distance, or infinity
// on cardinality mismatch.
inline double multiset_distance(std::vector<std::complex<double>> a,
                                std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& va : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = b.size();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(va - b[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace detail

struct SchurCheckReport {
  int n = 0;
  int trials = 0;
  int real_pairs_tested = 0;
  int complex_pairs_tested = 0;
  double max_reconstruction_rel = 0.0;   // ||X - Q M Q^T||_F / ||X||_F
  double max_orthogonality_defect = 0.0; // ||Q^T Q - I||_F
  double max_y2_bc_rel = 0.0;            // |y^2 - b c| / y^2
  double max_spectral_mismatch = 0.0;    // block eigenvalues vs full spectrum
  bool degeneracies_exact = true;        // Jacobian zeros and char-poly identity
  std::uint64_t worst_stream = 0;        // stream of the worst reconstruction

  bool ok() const {
    return max_reconstruction_rel <= 1e-12 && max_orthogonality_defect <= 1e-12 &&
           max_y2_bc_rel <= 1e-10 && max_spectral_mismatch <= 1e-8 &&
           degeneracies_exact;
  }
};

inline SchurCheckReport schur_check(int n, int trials, std::uint64_t seed) {
  if (n < 2) throw ConfigError("schur_check: n must be >= 2");
  if (trials < 1) throw ConfigError("schur_check: trials must be >= 1");
  SchurCheckReport rep;
  rep.n = n;
  rep.trials = trials;

  auto note_recon = [&](double rel, std::uint64_t stream) {
    if (rel > rep.max_reconstruction_rel) {
      rep.max_reconstruction_rel = rel;
      rep.worst_stream = stream;
    }
  };

  for (int trial = 0; trial < trials; ++trial) {
    const RngStream stream{seed, static_cast<std::uint64_t>(trial)};
    const MatrixX<double> x = sample_ginibre(n, stream);
    const double xnorm = x.norm();
    const Spectrum spec = compute_spectrum(x).spectrum;
    const auto full = detail::to_complex_list(spec);

    if (spec.real_eigs.size() >= 2) {
      const auto [lo_it, hi_it] =
          std::minmax_element(spec.real_eigs.begin(), spec.real_eigs.end());
      const double l1 = *lo_it, l2 = *hi_it;
      if (l2 - l1 > 1e-6) {
        const auto d = partial_schur_real_pair(x, l1, l2);
        ++rep.real_pairs_tested;
        note_recon((x - d.reconstruct()).norm() / xnorm, stream.stream);
        rep.max_orthogonality_defect = std::max(
            rep.max_orthogonality_defect,
            (d.q.transpose() * d.q - MatrixX<double>::Identity(n, n)).norm());
        auto blocks = detail::to_complex_list(compute_spectrum(d.y1).spectrum);
        blocks.emplace_back(d.x1, 0.0);
        blocks.emplace_back(d.x2, 0.0);
        rep.max_spectral_mismatch = std::max(
            rep.max_spectral_mismatch, detail::multiset_distance(full, blocks));
        // Jacobian symmetry and collision zero.
        if (jacobian_real_pair(d.x1, d.x2, d.y1) !=
                jacobian_real_pair(d.x2, d.x1, d.y1) ||
            jacobian_real_pair(d.x1, d.x1, d.y1) != 0.0)
          rep.degeneracies_exact = false;
      }
    }

    if (!spec.complex_pairs.empty()) {
      const auto best = std::max_element(
          spec.complex_pairs.begin(), spec.complex_pairs.end(),
          [](const ComplexPair& a, const ComplexPair& b) { return a.y < b.y; });
      const auto d = partial_schur_complex_pair(x, best->x, best->y);
      ++rep.complex_pairs_tested;
      note_recon((x - d.reconstruct()).norm() / xnorm, stream.stream);
      rep.max_orthogonality_defect = std::max(
          rep.max_orthogonality_defect,
          (d.q.transpose() * d.q - MatrixX<double>::Identity(n, n)).norm());
      rep.max_y2_bc_rel =
          std::max(rep.max_y2_bc_rel, std::abs(d.y * d.y - d.b * d.c) / (d.y * d.y));
      auto blocks = detail::to_complex_list(compute_spectrum(d.y2).spectrum);
      blocks.emplace_back(d.x, d.y);
      blocks.emplace_back(d.x, -d.y);
      rep.max_spectral_mismatch = std::max(rep.max_spectral_mismatch,
                                           detail::multiset_distance(full, blocks));

      // Degeneracy zeros of the complex-pair Jacobian.
      if (jacobian_complex_pair(d.x, d.y, 0.0, d.y2) != 0.0 ||
          jacobian_complex_pair(d.x, 0.0, d.eta, d.y2) != 0.0)
        rep.degeneracies_exact = false;

      // At y = 0 the squared modulus of the characteristic polynomial equals
      // the real-pair determinant factor at x1 = x2 = x, bit for bit.
      const double det_r = shifted_det(d.x, d.y2);
      if (shifted_det_sq_modulus(d.x, 0.0, d.y2) != std::abs(det_r * det_r))
        rep.degeneracies_exact = false;
    }
  }
  return rep;
}

}  // namespace rmt
