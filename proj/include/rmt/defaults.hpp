#pragma once

#include "rmt/densities.hpp"
#include "rmt/estimators.hpp"

// Per-ensemble defaults for histogram windows, strip placement and point-mass
// exclusions. All of them are overridable from the CLI.

namespace rmt {

// Half-width q with central mass p of the spherical real density:
// the CDF is (1/pi) atan(x^{1/k}) + 1/2, so q = tan(pi p / 2)^k.
inline double spherical_central_halfwidth(int k, double mass) {
  return std::pow(std::tan(kPi * mass / 2.0), k);
}

// Characteristic height of the complex support in the imaginary direction.
inline double support_height(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return 1.0;
    case EnsembleKind::spherical_product:
      return 1.0;  // unit-median radius for every k
    case EnsembleKind::rajan_abbott:
      return rajan_abbott_radius(std::get<RajanAbbottParams>(spec.params));
    case EnsembleKind::ginibre_diffusion:
      return spiric_max_height(std::get<DiffusionParams>(spec.params).t);
    case EnsembleKind::regular_digraph:
      return std::sqrt(static_cast<double>(std::get<GraphParams>(spec.params).k));
  }
  return 1.0;
}

// Strip clear of the notch: the depletion zone has width of order 1/sqrt(n)
// with an unknown constant; 3/sqrt(n) is an empirical safety margin.
inline StripSpec default_strip(const EnsembleSpec& spec) {
  const double y_lo = 3.0 / std::sqrt(static_cast<double>(spec.n));
  const double y_hi = std::max(2.0 * y_lo, 0.1 * support_height(spec));
  return {y_lo, y_hi};
}

// Histogram half-width: support edge plus 5% slack for finite-n stragglers;
// spherical ensembles have unbounded support, so take the central 98% mass.
inline double default_halfwidth(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return 1.05;
    case EnsembleKind::spherical_product:
      return spherical_central_halfwidth(std::get<SphericalParams>(spec.params).k, 0.98);
    case EnsembleKind::rajan_abbott:
      return 1.05 * rajan_abbott_radius(std::get<RajanAbbottParams>(spec.params));
    case EnsembleKind::ginibre_diffusion:
      return 1.05 * spiric_real_support(std::get<DiffusionParams>(spec.params).t).back().hi;
    case EnsembleKind::regular_digraph:
      return 1.05 * std::sqrt(static_cast<double>(std::get<GraphParams>(spec.params).k));
  }
  return 1.0;
}

// Graph spectra carry point masses: the Perron-Frobenius eigenvalue k always,
// zero eigenvalues for k = 2 (lack of strong connectivity).
inline ExclusionPolicy default_exclusions(const EnsembleSpec& spec) {
  ExclusionPolicy policy;
  if (spec.kind == EnsembleKind::regular_digraph) {
    const int k = std::get<GraphParams>(spec.params).k;
    policy.perron_frobenius = static_cast<double>(k);
    policy.exclude_zero = (k == 2);
  }
  return policy;
}

}  // namespace rmt
