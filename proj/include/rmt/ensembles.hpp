#pragma once

#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "rmt/rng.hpp"
#include "rmt/types.hpp"

// Samplers for the five ensembles. Every sampler is a pure function of
// (n, params, seed, stream): trials farm out across threads with one stream
// per trial index and reproduce bit-identically in any schedule.

namespace rmt {

// Entries i.i.d. N(0, 1/n); bulk spectrum fills the unit disk.
template <typename Scalar = double>
MatrixX<Scalar> sample_ginibre(int n, RngStream stream) {
  if (n < 1) throw ConfigError("sample_ginibre: n must be >= 1");
  Rng rng(stream);
  MatrixX<Scalar> x(n, n);
  const Scalar sd = Scalar(1) / std::sqrt(Scalar(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = sd * static_cast<Scalar>(rng.gaussian());
  return x;
}

// A * B^{-1} through a linear solve (B^T y = A^T row-wise); B is never
// inverted explicitly. Also the injection point for solver sanity checks:
// spherical_pair_product(A, A) has the identity spectrum.
template <typename Scalar>
MatrixX<Scalar> spherical_pair_product(const MatrixX<Scalar>& a,
                                       const MatrixX<Scalar>& b) {
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(b.transpose());
  if (lu.rcond() < Scalar(1e-14))
    throw NumericalError("spherical_pair_product: factor B is numerically singular");
  return lu.solve(a.transpose()).transpose();
}

// Product of k independent spherical factors A_j B_j^{-1}. A numerically
// singular B_j is resampled once from the same stream, then reported.
template <typename Scalar = double>
MatrixX<Scalar> sample_spherical_product(int n, int k, RngStream stream) {
  if (n < 2) throw ConfigError("sample_spherical_product: n must be >= 2");
  if (k < 1) throw ConfigError("sample_spherical_product: k must be >= 1");
  Rng rng(stream);
  const Scalar sd = Scalar(1) / std::sqrt(Scalar(n));
  auto draw = [&](MatrixX<Scalar>& m) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m(i, j) = sd * static_cast<Scalar>(rng.gaussian());
  };
  MatrixX<Scalar> result = MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> a(n, n), b(n, n);
  for (int factor = 0; factor < k; ++factor) {
    draw(a);
    draw(b);
    MatrixX<Scalar> p;
    try {
      p = spherical_pair_product(a, b);
    } catch (const NumericalError&) {
      draw(b);  // resample B once
      p = spherical_pair_product(a, b);
    }
    result = (result * p).eval();
  }
  return result;
}

// First round(f_e n) columns excitatory (std sigma_e / sqrt(n)), the rest
// inhibitory (sigma_i / sqrt(n)); each column is centered so its sum is
// exactly zero at working precision. Means are zero outright: the spectrum is
// insensitive to them.
template <typename Scalar = double>
MatrixX<Scalar> sample_rajan_abbott(int n, const RajanAbbottParams& p,
                                    RngStream stream) {
  const int ne = excitatory_columns(p.f_e, n);
  if (ne < 1 || ne > n - 1)
    throw ConfigError("sample_rajan_abbott: round(f_e*n) must lie in [1, n-1]");
  if (!(p.sigma_e > 0.0 && p.sigma_i > 0.0))
    throw ConfigError("sample_rajan_abbott: sigma_e, sigma_i must be positive");
  Rng rng(stream);
  MatrixX<Scalar> w(n, n);
  const Scalar root_n = std::sqrt(Scalar(n));
  for (int j = 0; j < n; ++j) {
    const Scalar sd = Scalar(j < ne ? p.sigma_e : p.sigma_i) / root_n;
    for (int i = 0; i < n; ++i) w(i, j) = sd * static_cast<Scalar>(rng.gaussian());
  }
  w.rowwise() -= w.colwise().mean();
  return w;
}

// X = diag(+1,...,+1,-1,...,-1) + G with G entries N(0, t/n): the Brownian
// increment at time t of matrix diffusion with diffusion constant 1/n.
template <typename Scalar = double>
MatrixX<Scalar> sample_ginibre_diffusion(int n, const DiffusionParams& p,
                                         RngStream stream) {
  if (n < 2 || n % 2 != 0)
    throw ConfigError("sample_ginibre_diffusion: n must be even and >= 2");
  if (!(p.t > 0.0)) throw ConfigError("sample_ginibre_diffusion: t must be > 0");
  Rng rng(stream);
  MatrixX<Scalar> x(n, n);
  const Scalar sd = std::sqrt(Scalar(p.t) / Scalar(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = sd * static_cast<Scalar>(rng.gaussian());
  for (int i = 0; i < n; ++i) x(i, i) += (i < n / 2) ? Scalar(1) : Scalar(-1);
  return x;
}

namespace detail {

inline void random_permutation(std::vector<int>& perm, Rng& rng) {
  const int n = static_cast<int>(perm.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
}

}  // namespace detail

// Adjacency matrix of a uniform k-regular oriented graph: the union of k
// uniform permutations, resampled wholesale until it is simple (no
// self-loops, no repeated edges). Acceptance probability is about e^{-k(k+1)/2+1},
// comfortably Theta(1) for small k.
template <typename Scalar = double>
MatrixX<Scalar> sample_regular_digraph(int n, const GraphParams& p,
                                       RngStream stream,
                                       int max_attempts = 10000) {
  if (p.k < 2) throw ConfigError("sample_regular_digraph: k must be >= 2");
  if (p.k >= n) throw ConfigError("sample_regular_digraph: k must be < n");
  Rng rng(stream);
  std::vector<std::vector<int>> perms(p.k, std::vector<int>(n));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    bool ok = true;
    for (auto& perm : perms) detail::random_permutation(perm, rng);
    for (int i = 0; i < n && ok; ++i) {
      for (int a = 0; a < p.k && ok; ++a) {
        if (perms[a][i] == i) ok = false;  // self-loop
        for (int b = a + 1; b < p.k && ok; ++b)
          if (perms[a][i] == perms[b][i]) ok = false;  // repeated edge
      }
    }
    if (!ok) continue;
    MatrixX<Scalar> adj = MatrixX<Scalar>::Zero(n, n);
    for (const auto& perm : perms)
      for (int i = 0; i < n; ++i) adj(i, perm[i]) = Scalar(1);
    return adj;
  }
  std::ostringstream msg;
  msg << "sample_regular_digraph: no simple graph in " << max_attempts
      << " attempts (n=" << n << ", k=" << p.k << ")";
  throw NumericalError(msg.str());
}

// Dispatch on the ensemble description.
inline MatrixX<double> sample(const EnsembleSpec& spec, RngStream stream) {
  validate(spec);
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return sample_ginibre(spec.n, stream);
    case EnsembleKind::spherical_product:
      return sample_spherical_product(
          spec.n, std::get<SphericalParams>(spec.params).k, stream);
    case EnsembleKind::rajan_abbott:
      return sample_rajan_abbott(spec.n, std::get<RajanAbbottParams>(spec.params),
                                 stream);
    case EnsembleKind::ginibre_diffusion:
      return sample_ginibre_diffusion(
          spec.n, std::get<DiffusionParams>(spec.params), stream);
    case EnsembleKind::regular_digraph:
      return sample_regular_digraph(spec.n, std::get<GraphParams>(spec.params),
                                    stream);
  }
  throw ConfigError("sample: unsupported ensemble");
}

}  // namespace rmt
