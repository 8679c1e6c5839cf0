#pragma once

#include <array>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "rmt/numerics.hpp"
#include "rmt/types.hpp"

// Analytic eigenvalue-density catalog for the five ensembles, plus the
// numerically computed normalization constants for the real-axis densities.
// Conventions: every rho_c_* integrates to 1 over the complex plane and every
// rho_r_* to 1 over its real support. Integrable singularities (spherical
// k > 1 at the origin) are reported as +infinity on purpose, never clamped.

namespace rmt {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// --- baseline circular law (unit variance scaling) -------------------------

inline double rho_c_ginibre(std::complex<double> z) {
  return std::abs(z) <= 1.0 ? 1.0 / kPi : 0.0;
}

// --- products of spherical ensembles ----------------------------------------

inline double rho_c_spherical_product(std::complex<double> z, int k) {
  if (k < 1) throw ConfigError("rho_c_spherical_product: k must be >= 1");
  const double r = std::abs(z);
  if (r == 0.0 && k > 1) return std::numeric_limits<double>::infinity();
  const double rk = std::pow(r, 2.0 / k);
  const double num = (r == 0.0) ? 1.0 : std::pow(r, 2.0 / k - 2.0);
  const double den = (1.0 + rk) * (1.0 + rk);
  return num / (kPi * k * den);
}

inline double rho_r_spherical_product(double x, int k) {
  if (k < 1) throw ConfigError("rho_r_spherical_product: k must be >= 1");
  const double a = std::abs(x);
  if (a == 0.0 && k > 1) return std::numeric_limits<double>::infinity();
  const double num = (a == 0.0) ? 1.0 : std::pow(a, 1.0 / k - 1.0);
  return num / (kPi * k * (1.0 + std::pow(a, 2.0 / k)));
}

// --- Rajan-Abbott synaptic connectivity -------------------------------------

inline double rajan_abbott_radius(const RajanAbbottParams& p) {
  return std::sqrt(p.f_e * p.sigma_e * p.sigma_e +
                   (1.0 - p.f_e) * p.sigma_i * p.sigma_i);
}

// Radial cumulative distribution F(r) of the complex density: the root in
// [0, 1] of  1 = sum_i f_i s_i^2 / (r^2 - s_i^2 (F - 1)).  For two
// populations this is a quadratic in u = 1 - F with exactly one root in
// [0, 1]; a bisection fallback guards the closed form.
inline double solve_radial_cdf_ra(const RajanAbbottParams& p, double r) {
  const double rmax = rajan_abbott_radius(p);
  if (r < 0.0 || r > rmax * (1.0 + 1e-12))
    throw ConfigError("solve_radial_cdf_ra: r outside [0, r_max]");
  r = std::min(r, rmax);
  const double ae = p.sigma_e * p.sigma_e;
  const double ai = p.sigma_i * p.sigma_i;
  const double fe = p.f_e, fi = 1.0 - p.f_e;
  const double r2 = r * r;

  const double A = ae * ai;
  const double B = r2 * (ae + ai) - ae * ai;
  const double C = r2 * (r2 - rmax * rmax);
  // A > 0 and C <= 0: one nonnegative root. Stable form avoids cancellation.
  const double disc = B * B - 4.0 * A * C;
  double u;
  if (disc >= 0.0) {
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    const double u1 = q / A;
    const double u2 = (q != 0.0) ? C / q : 0.0;
    u = std::max(u1, u2);  // the nonnegative root
  } else {
    u = -1.0;  // force fallback
  }
  double F = 1.0 - u;
  auto residual = [&](double Fv) {
    return fe * ae / (r2 + ae * (1.0 - Fv)) + fi * ai / (r2 + ai * (1.0 - Fv)) -
           1.0;
  };
  if (!(F >= -1e-9 && F <= 1.0 + 1e-9) || std::abs(residual(std::clamp(F, 0.0, 1.0))) > 1e-9) {
    F = find_root(residual, 0.0, 1.0, 1e-14);
  }
  return std::clamp(F, 0.0, 1.0);
}

// rho^c(r) = (1/2 pi r) dF/dr with dF/dr from implicit differentiation of the
// F(r) equation; the 1/r cancels, so the value is finite on [0, r_max].
inline double rho_c_rajan_abbott(const RajanAbbottParams& p, double r) {
  const double rmax = rajan_abbott_radius(p);
  if (r < 0.0 || r >= rmax) return 0.0;
  const double F = solve_radial_cdf_ra(p, r);
  const double ae = p.sigma_e * p.sigma_e;
  const double ai = p.sigma_i * p.sigma_i;
  const double fe = p.f_e, fi = 1.0 - p.f_e;
  const double de = r * r + ae * (1.0 - F);
  const double di = r * r + ai * (1.0 - F);
  const double num = fe * ae / (de * de) + fi * ai / (di * di);
  const double den = fe * ae * ae / (de * de) + fi * ai * ai / (di * di);
  return num / (kPi * den);
}

namespace detail {

template <typename Key>
class NormCache {
 public:
  template <typename Fn>
  double get_or_compute(const Key& key, Fn&& fn) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const double v = fn();
    values_.emplace(key, v);
    return v;
  }

 private:
  std::mutex mutex_;
  std::map<Key, double> values_;
};

}  // namespace detail

// Normalization constant C with rho_r = C sqrt(rho_c) integrating to 1 on
// [-r_max, r_max]; cached per parameter triple.
inline double rajan_abbott_norm_const(const RajanAbbottParams& p) {
  using Key = std::array<double, 3>;
  static detail::NormCache<Key> cache;
  return cache.get_or_compute(Key{p.f_e, p.sigma_e, p.sigma_i}, [&] {
    const double rmax = rajan_abbott_radius(p);
    const double half = quadrature(
        [&](double r) { return std::sqrt(std::max(rho_c_rajan_abbott(p, r), 0.0)); },
        0.0, rmax, 1e-8);
    return 1.0 / (2.0 * half);
  });
}

inline double rho_r_rajan_abbott(const RajanAbbottParams& p, double x) {
  const double rmax = rajan_abbott_radius(p);
  if (std::abs(x) >= rmax) return 0.0;
  return rajan_abbott_norm_const(p) * std::sqrt(rho_c_rajan_abbott(p, std::abs(x)));
}

// --- Ginibre diffusion from the +-1 initial condition ------------------------

// Spectrum support: t (1 + |z|^2) >= |1 - z^2|^2, the region enclosed by the
// spiric section that contains +-1.
inline bool spiric_contains(std::complex<double> z, double t) {
  const std::complex<double> w = 1.0 - z * z;
  return t * (1.0 + std::norm(z)) >= std::norm(w);
}

// Real-axis support: roots of (1 - x^2)^2 = t (1 + x^2), i.e.
// x^2 = [(2+t) +- sqrt(t^2 + 8t)]/2. One interval for t >= 1, two symmetric
// lobes for t < 1.
inline std::vector<Interval> spiric_real_support(double t) {
  if (!(t > 0.0)) throw ConfigError("spiric_real_support: t must be > 0");
  const double s = std::sqrt(t * t + 8.0 * t);
  const double outer = std::sqrt(0.5 * (2.0 + t + s));
  const double inner_sq = 0.5 * (2.0 + t - s);
  if (inner_sq > 0.0 && t < 1.0) {
    const double inner = std::sqrt(inner_sq);
    return {{-outer, -inner}, {inner, outer}};
  }
  return {{-outer, outer}};
}

// Largest |Im z| over the support, used to pick sensible strip defaults.
inline double spiric_max_height(double t) {
  // For s = x^2, the squared height is
  //   w(s) = [-(2 + 2s - t) + sqrt((2 + 2s - t)^2 - 4((1-s)^2 - t(1+s)))]/2
  // whenever the discriminant admits w >= 0; scan + golden-section refine.
  auto w_of_s = [&](double s) {
    const double b = 2.0 + 2.0 * s - t;
    const double c = (1.0 - s) * (1.0 - s) - t * (1.0 + s);
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) return -1.0;
    return 0.5 * (-b + std::sqrt(disc));
  };
  const double outer = spiric_real_support(t).back().hi;
  double best_s = 0.0, best_w = 0.0;
  const int grid = 512;
  for (int i = 0; i <= grid; ++i) {
    const double s = (outer * outer) * i / grid;
    const double w = w_of_s(s);
    if (w > best_w) {
      best_w = w;
      best_s = s;
    }
  }
  double lo = std::max(0.0, best_s - outer * outer / grid);
  double hi = std::min(outer * outer, best_s + outer * outer / grid);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - gr * (hi - lo);
    const double m2 = lo + gr * (hi - lo);
    if (w_of_s(m1) < w_of_s(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::sqrt(std::max(best_w, w_of_s(0.5 * (lo + hi))));
}

// Complex density of the diffusion model; constant in the imaginary
// direction inside the support. The +-1/(8 pi x^2) pieces cancel as x -> 0;
// a series branch below |x| = 1e-4 sqrt(t) sidesteps the catastrophic
// cancellation of the naive expression.
inline double rho_c_spiric(std::complex<double> z, double t) {
  if (!(t > 0.0)) throw ConfigError("rho_c_spiric: t must be > 0");
  if (!spiric_contains(z, t)) return 0.0;
  const double x = z.real();
  const double ax = std::abs(x);
  if (ax < 1e-4 * std::sqrt(t)) {
    const double x2 = x * x;
    const double t2 = t * t;
    return ((t - 1.0) / t2 + 12.0 * x2 / (t2 * t2) -
            160.0 * x2 * x2 / (t2 * t2 * t2)) /
           kPi;
  }
  const double x2 = x * x;
  return -1.0 / (8.0 * kPi * x2) + 1.0 / (kPi * t) +
         t / (8.0 * kPi * x2 * std::sqrt(16.0 * x2 + t * t));
}

// Normalization constant c(t) for the real-axis density; cached per t.
inline double spiric_norm_const(double t) {
  static detail::NormCache<double> cache;
  return cache.get_or_compute(t, [&] {
    double mass = 0.0;
    for (const Interval& iv : spiric_real_support(t)) {
      mass += quadrature(
          [&](double x) {
            return std::sqrt(std::max(rho_c_spiric({x, 0.0}, t), 0.0));
          },
          iv.lo, iv.hi, 1e-9);
    }
    return 1.0 / mass;
  });
}

inline double rho_r_spiric(double x, double t) {
  const double rc = rho_c_spiric({x, 0.0}, t);
  if (rc <= 0.0) return 0.0;
  return spiric_norm_const(t) * std::sqrt(rc);
}

// --- k-regular oriented graphs ----------------------------------------------

inline double rho_c_regular_graph(std::complex<double> z, int k) {
  if (k < 2) throw ConfigError("rho_c_regular_graph: k must be >= 2");
  // support test on the radius itself: |z| <= sqrt(k), boundary included
  const double r = std::abs(z);
  if (r > std::sqrt(static_cast<double>(k))) return 0.0;
  const double q = k / (k * static_cast<double>(k) - r * r);
  return (k - 1.0) / kPi * q * q;
}

inline double regular_graph_log_prefactor(int k) {
  const double sk = std::sqrt(static_cast<double>(k));
  return std::log((sk + 1.0) * (sk + 1.0) / (k - 1.0));
}

inline double rho_r_regular_graph(double x, int k) {
  if (k < 2) throw ConfigError("rho_r_regular_graph: k must be >= 2");
  if (x * x >= static_cast<double>(k)) return 0.0;
  return (1.0 / regular_graph_log_prefactor(k)) * k /
         (k * static_cast<double>(k) - x * x);
}

// --- tabulated predictions ---------------------------------------------------

// Prediction for one ensemble on a grid: unit-mass real density, the complex
// density continued to the real axis, the real support, and the
// proportionality constant alpha with rho_r = alpha sqrt(rho_c) where that
// constant is what fixes the normalization.
struct DensityCurve {
  std::vector<double> xs;
  std::vector<double> rho_r;
  std::vector<double> rho_c_axis;
  std::vector<Interval> support;
  double norm_const = std::numeric_limits<double>::quiet_NaN();
};

inline double rho_r_prediction(const EnsembleSpec& spec, double x) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return std::abs(x) <= 1.0 ? 0.5 : 0.0;
    case EnsembleKind::spherical_product:
      return rho_r_spherical_product(x, std::get<SphericalParams>(spec.params).k);
    case EnsembleKind::rajan_abbott:
      return rho_r_rajan_abbott(std::get<RajanAbbottParams>(spec.params), x);
    case EnsembleKind::ginibre_diffusion:
      return rho_r_spiric(x, std::get<DiffusionParams>(spec.params).t);
    case EnsembleKind::regular_digraph:
      return rho_r_regular_graph(x, std::get<GraphParams>(spec.params).k);
  }
  throw ConfigError("rho_r_prediction: unsupported ensemble");
}

inline double rho_c_axis_prediction(const EnsembleSpec& spec, double x) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return rho_c_ginibre({x, 0.0});
    case EnsembleKind::spherical_product:
      return rho_c_spherical_product({x, 0.0},
                                     std::get<SphericalParams>(spec.params).k);
    case EnsembleKind::rajan_abbott: {
      const auto& p = std::get<RajanAbbottParams>(spec.params);
      return std::abs(x) < rajan_abbott_radius(p)
                 ? rho_c_rajan_abbott(p, std::abs(x))
                 : 0.0;
    }
    case EnsembleKind::ginibre_diffusion:
      return rho_c_spiric({x, 0.0}, std::get<DiffusionParams>(spec.params).t);
    case EnsembleKind::regular_digraph:
      return rho_c_regular_graph({x, 0.0},
                                 std::get<GraphParams>(spec.params).k);
  }
  throw ConfigError("rho_c_axis_prediction: unsupported ensemble");
}

inline std::vector<Interval> real_support_prediction(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return {{-1.0, 1.0}};
    case EnsembleKind::spherical_product: {
      const double inf = std::numeric_limits<double>::infinity();
      return {{-inf, inf}};
    }
    case EnsembleKind::rajan_abbott: {
      const double r = rajan_abbott_radius(std::get<RajanAbbottParams>(spec.params));
      return {{-r, r}};
    }
    case EnsembleKind::ginibre_diffusion:
      return spiric_real_support(std::get<DiffusionParams>(spec.params).t);
    case EnsembleKind::regular_digraph: {
      const double sk = std::sqrt(
          static_cast<double>(std::get<GraphParams>(spec.params).k));
      return {{-sk, sk}};
    }
  }
  throw ConfigError("real_support_prediction: unsupported ensemble");
}

// The constant alpha in rho_r = alpha sqrt(rho_c on axis) once rho_r has unit
// mass; closed form where the catalog pair is closed form, numeric otherwise.
inline double sqrt_relation_const(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      return 0.5 * std::sqrt(kPi);
    case EnsembleKind::spherical_product:
      return 1.0 / std::sqrt(kPi * std::get<SphericalParams>(spec.params).k);
    case EnsembleKind::rajan_abbott:
      return rajan_abbott_norm_const(std::get<RajanAbbottParams>(spec.params));
    case EnsembleKind::ginibre_diffusion:
      return spiric_norm_const(std::get<DiffusionParams>(spec.params).t);
    case EnsembleKind::regular_digraph: {
      const int k = std::get<GraphParams>(spec.params).k;
      return std::sqrt(kPi / (k - 1.0)) / regular_graph_log_prefactor(k);
    }
  }
  throw ConfigError("sqrt_relation_const: unsupported ensemble");
}

inline DensityCurve predict_curve(const EnsembleSpec& spec, double xmin,
                                  double xmax, int points) {
  if (points < 2) throw ConfigError("predict_curve: points must be >= 2");
  if (!(xmin < xmax)) throw ConfigError("predict_curve: requires xmin < xmax");
  validate(spec);
  DensityCurve curve;
  curve.support = real_support_prediction(spec);
  curve.norm_const = sqrt_relation_const(spec);
  curve.xs.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x = xmin + (xmax - xmin) * i / (points - 1);
    curve.xs.push_back(x);
    curve.rho_r.push_back(rho_r_prediction(spec, x));
    curve.rho_c_axis.push_back(rho_c_axis_prediction(spec, x));
  }
  return curve;
}

}  // namespace rmt
