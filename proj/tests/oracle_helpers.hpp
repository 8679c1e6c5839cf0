#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// characteristic polynomials via Faddeev-LeVerrier, polynomial roots via
// Durand-Kerner, and a plain bisection root finder.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Monic characteristic polynomial coefficients c[0] + c[1] x + ... + x^n.
inline std::vector<double> char_poly(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[n] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    m = (a * m).eval();
    c[n - k] = -m.trace() / k;
    m.diagonal().array() += c[n - k];
  }
  return c;
}

inline std::complex<double> poly_eval(const std::vector<double>& c,
                                      std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// Durand-Kerner simultaneous iteration; fine for the simple roots of random
// matrices.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c,
                                                    int max_iter = 2000) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> z(n);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p = 1.0;
  for (int i = 0; i < n; ++i) {
    p *= seed;
    z[i] = p;
  }
  for (int it = 0; it < max_iter; ++it) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const std::complex<double> step = poly_eval(c, z[i]) / denom;
      z[i] -= step;
      worst = std::max(worst, std::abs(step));
    }
    if (worst < 1e-14) break;
  }
  return z;
}

inline std::vector<std::complex<double>> eigenvalues_by_char_poly(
    const Eigen::MatrixXd& a) {
  return poly_roots(char_poly(a));
}

// Largest distance in a greedy nearest-neighbour matching of two multisets.
inline double multiset_distance(std::vector<std::complex<double>> a,
                                std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& va : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
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

// Plain bisection, deliberately separate from rmt::find_root.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
