#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "rmt/numerics.hpp"
#include "rmt/types.hpp"

// Empirical density estimation on the real axis plus the strip estimator for
// the complex density at the axis, and the sqrt-relation fit between them.

namespace rmt {

struct HistSpec {
  double lo = -1.0;
  double hi = 1.0;
  int bins = 41;
};

// Band 0 < y_lo < y_hi in the imaginary direction. Estimates of rho^c at the
// axis use both mirror strips (implicitly, via conjugate symmetry); y_lo must
// clear the notch carved by real-eigenvalue repulsion, which has width of
// order 1/sqrt(n).
struct StripSpec {
  double y_lo = 0.0;
  double y_hi = 0.0;
};

// Point masses dropped from real-axis histograms so they cannot distort the
// normalization of the continuous part: the Perron-Frobenius outlier of
// k-regular graphs (tolerance 1e-6 k) and, where enabled, exact zeros
// (tolerance 1e-8).
struct ExclusionPolicy {
  std::optional<double> perron_frobenius;
  bool exclude_zero = false;

  static constexpr double kPfRelTol = 1e-6;
  static constexpr double kZeroTol = 1e-8;
};

class RealAxisAccumulator {
 public:
  RealAxisAccumulator(const HistSpec& spec, const ExclusionPolicy& policy)
      : hist_(spec.lo, spec.hi, spec.bins), policy_(policy) {}

  void add(const Spectrum& s) {
    hist_.add_weight(1);
    for (double v : s.real_eigs) {
      ++total_real_;
      if (policy_.perron_frobenius &&
          std::abs(v - *policy_.perron_frobenius) <=
              ExclusionPolicy::kPfRelTol * std::abs(*policy_.perron_frobenius)) {
        ++excluded_pf_;
        continue;
      }
      if (policy_.exclude_zero && std::abs(v) <= ExclusionPolicy::kZeroTol) {
        ++excluded_zero_;
        continue;
      }
      hist_.accumulate(v);
    }
  }

  void merge(const RealAxisAccumulator& o) {
    hist_ = rmt::merge(hist_, o.hist_);
    excluded_pf_ += o.excluded_pf_;
    excluded_zero_ += o.excluded_zero_;
    total_real_ += o.total_real_;
  }

  const Histogram1D& hist() const { return hist_; }
  std::int64_t excluded_pf() const { return excluded_pf_; }
  std::int64_t excluded_zero() const { return excluded_zero_; }
  std::int64_t total_real() const { return total_real_; }

  double excluded_mass() const {
    return total_real_ > 0
               ? static_cast<double>(excluded_pf_ + excluded_zero_) / total_real_
               : 0.0;
  }

  // Unit-mass density over the in-range, non-excluded real eigenvalues.
  DensitySamples density() const {
    if (total_real_ > 0 && hist_.total_in_range() == 0)
      throw NumericalError("estimate_rho_r: every real eigenvalue was excluded");
    return to_density(hist_, Normalization::unit_mass);
  }

 private:
  Histogram1D hist_;
  ExclusionPolicy policy_;
  std::int64_t excluded_pf_ = 0;
  std::int64_t excluded_zero_ = 0;
  std::int64_t total_real_ = 0;
};

class StripAccumulator {
 public:
  StripAccumulator(const HistSpec& spec, const StripSpec& strip)
      : hist_(spec.lo, spec.hi, spec.bins), strip_(strip) {
    if (!(strip.y_lo > 0.0) || !(strip.y_hi > strip.y_lo))
      throw ConfigError("strip: requires 0 < y_lo < y_hi");
  }

  void add(const Spectrum& s) {
    hist_.add_weight(1);
    for (const ComplexPair& p : s.complex_pairs)
      if (p.y >= strip_.y_lo && p.y <= strip_.y_hi) hist_.accumulate(p.x);
  }

  void merge(const StripAccumulator& o) { hist_ = rmt::merge(hist_, o.hist_); }

  const Histogram1D& hist() const { return hist_; }
  const StripSpec& strip() const { return strip_; }

  // Per-unit-area density at the axis. Counting upper-half representatives
  // over one strip equals counting eigenvalues over both mirror strips of
  // total height 2 (y_hi - y_lo); this normalization makes the estimate of
  // rho^c integrate to 1 over the plane.
  DensitySamples density(Index n) const {
    if (hist_.total_in_range() + hist_.overflow() == 0)
      throw NumericalError(
          "estimate_rho_c_axis: no complex eigenvalues in the strip; widen the "
          "strip or run more trials");
    DensitySamples out;
    out.binwidth = hist_.binwidth();
    const double denom = static_cast<double>(hist_.weight()) * static_cast<double>(n) *
                         (strip_.y_hi - strip_.y_lo) * hist_.binwidth();
    for (int i = 0; i < hist_.bins(); ++i) {
      out.x.push_back(hist_.center(i));
      out.rho.push_back(static_cast<double>(hist_.count(i)) / denom);
    }
    return out;
  }

 private:
  Histogram1D hist_;
  StripSpec strip_;
};

inline RealAxisAccumulator accumulate_rho_r(std::span<const Spectrum> spectra,
                                            const HistSpec& spec,
                                            const ExclusionPolicy& policy) {
  if (spectra.empty()) throw ConfigError("estimate_rho_r: no spectra");
  RealAxisAccumulator acc(spec, policy);
  for (const Spectrum& s : spectra) acc.add(s);
  return acc;
}

inline DensitySamples estimate_rho_r(std::span<const Spectrum> spectra,
                                     const HistSpec& spec,
                                     const ExclusionPolicy& policy) {
  return accumulate_rho_r(spectra, spec, policy).density();
}

inline DensitySamples estimate_rho_c_axis(std::span<const Spectrum> spectra,
                                          const StripSpec& strip,
                                          const HistSpec& spec) {
  if (spectra.empty()) throw ConfigError("estimate_rho_c_axis: no spectra");
  StripAccumulator acc(spec, strip);
  for (const Spectrum& s : spectra) acc.add(s);
  return acc.density(spectra.front().n);
}

struct FitResult {
  double alpha = 0.0;     // least-squares constant in rho_r ~ alpha sqrt(rho_c)
  double residual = 0.0;  // rms misfit relative to the rms of rho_r
  int bins_used = 0;
};

// Least-squares alpha = sum(rho_r sqrt(rho_c)) / sum(rho_c) over bins where
// both estimates are positive, after dropping the outermost such bin on each
// side (rho_c jumps at support edges and bin averaging biases sqrt(rho_c)
// there).
inline FitResult fit_sqrt_relation(const DensitySamples& rho_r,
                                   const DensitySamples& rho_c) {
  if (rho_r.x.size() != rho_c.x.size() || rho_r.binwidth != rho_c.binwidth ||
      (!rho_r.x.empty() && rho_r.x.front() != rho_c.x.front()))
    throw ConfigError("fit_sqrt_relation: bin grids differ");
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < rho_r.x.size(); ++i)
    if (rho_r.rho[i] > 0.0 && rho_c.rho[i] > 0.0 &&
        std::isfinite(rho_c.rho[i]))
      usable.push_back(i);
  if (usable.size() < 5)
    throw NumericalError("fit_sqrt_relation: fewer than 5 bins with both estimates positive");
  usable.erase(usable.begin());
  usable.pop_back();

  double num = 0.0, den = 0.0;
  for (auto i : usable) {
    num += rho_r.rho[i] * std::sqrt(rho_c.rho[i]);
    den += rho_c.rho[i];
  }
  if (den <= 0.0) throw NumericalError("fit_sqrt_relation: degenerate rho_c");
  FitResult fit;
  fit.alpha = num / den;
  fit.bins_used = static_cast<int>(usable.size());
  double misfit = 0.0, scale = 0.0;
  for (auto i : usable) {
    const double d = rho_r.rho[i] - fit.alpha * std::sqrt(rho_c.rho[i]);
    misfit += d * d;
    scale += rho_r.rho[i] * rho_r.rho[i];
  }
  fit.residual = std::sqrt(misfit / scale);
  return fit;
}

struct Score {
  double l1 = 0.0;
  double ks = 0.0;
};

// Agreement between a histogram estimate and an analytic prediction:
// L1 distance against the bin-averaged prediction and the Kolmogorov-Smirnov
// statistic at bin edges, both conditioned on the histogram window. The
// prediction CDF comes from quadrature, so no Monte Carlo noise enters from
// the reference side. Per-bin integrals split at zero to keep integrable
// singularities away from quadrature nodes.
inline Score score_against_catalog(const Histogram1D& hist,
                                   const std::function<double(double)>& rho_pred,
                                   double quad_tol = 1e-9) {
  const int nb = hist.bins();
  std::vector<double> mass(nb, 0.0);
  auto integrate_bin = [&](double a, double b) {
    if (a < 0.0 && b > 0.0)
      return quadrature(rho_pred, a, 0.0, quad_tol / 2) +
             quadrature(rho_pred, 0.0, b, quad_tol / 2);
    return quadrature(rho_pred, a, b, quad_tol);
  };
  double total_mass = 0.0;
  for (int i = 0; i < nb; ++i) {
    mass[i] = integrate_bin(hist.edge(i), hist.edge(i + 1));
    total_mass += mass[i];
  }
  if (!(total_mass > 0.0))
    throw NumericalError("score_against_catalog: prediction has no mass on the histogram window");

  const std::int64_t total_counts = hist.total_in_range();
  if (total_counts <= 0)
    throw NumericalError("score_against_catalog: empty histogram");

  Score score;
  double cum_counts = 0.0, cum_mass = 0.0;
  for (int i = 0; i < nb; ++i) {
    const double rho_hat =
        static_cast<double>(hist.count(i)) / (total_counts * hist.binwidth());
    const double rho_bar = mass[i] / (total_mass * hist.binwidth());
    score.l1 += std::abs(rho_hat - rho_bar) * hist.binwidth();
    cum_counts += static_cast<double>(hist.count(i));
    cum_mass += mass[i];
    const double diff =
        std::abs(cum_counts / total_counts - cum_mass / total_mass);
    score.ks = std::max(score.ks, diff);
  }
  return score;
}

}  // namespace rmt
