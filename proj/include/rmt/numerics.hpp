#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>
#include <vector>

#include "rmt/types.hpp"

namespace rmt {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK dqk15 data).
// All nodes are interior, so integrable endpoint singularities |x|^-a, a < 1,
// are handled by plain subdivision: the rule never evaluates at an endpoint.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

// Odd-indexed Kronrod nodes (and the center) are the embedded 7-point Gauss
// rule; the difference of the two estimates is the error proxy.
template <typename F>
void gk15(F&& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGK15Nodes[i];
    const double fsum = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
    resk += kGK15WeightsK[i] * fsum;
    if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * fsum;
  }
  value = resk * h;
  error = std::abs((resk - resg) * h);
}

}  // namespace detail

struct QuadratureOptions {
  int max_intervals = 4000;
};

// Globally adaptive Gauss-Kronrod 7-15 quadrature: always bisects the
// interval with the largest error estimate until the summed estimate meets
// tol (absolute). Throws NumericalError with the partial estimate if the
// subdivision budget runs out.
template <typename F>
double quadrature(F&& f, double a, double b, double tol,
                  QuadratureOptions opt = {}) {
  if (!(a < b)) throw ConfigError("quadrature: requires a < b");
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> queue;
  auto make = [&](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0};
    detail::gk15(f, lo, hi, p.value, p.error);
    return p;
  };
  queue.push(make(a, b));
  double total_value = queue.top().value;
  double total_error = queue.top().error;
  int used = 1;
  while (total_error > tol && used < opt.max_intervals) {
    Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Interval has collapsed to rounding width; its error is irreducible.
      total_error -= worst.error;
      continue;
    }
    Piece left = make(worst.a, mid);
    Piece right = make(mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++used;
  }
  if (total_error > tol) {
    std::ostringstream msg;
    msg << "quadrature: did not reach tol=" << tol << " within "
        << opt.max_intervals << " intervals (partial estimate " << total_value
        << ", error " << total_error << ")";
    throw NumericalError(msg.str());
  }
  return total_value;
}

// Integral over [a, inf) via the cubic map x = a + t^3/(1-t)^3, t in [0,1).
// A tail f ~ x^{-1-e} transforms to (1-t)^{3e-1}, bounded for e >= 1/3, so
// heavy tails down to 1/x^{4/3} need no special treatment beyond subdivision.
// The guard at t -> 1 only triggers once an interval has shrunk to rounding
// width; the mass it drops is O(width) of a bounded integrand.
template <typename F>
double quadrature_half_line(F&& f, double a, double tol,
                            QuadratureOptions opt = {}) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    if (om <= 0.0) return 0.0;
    const double r = t / om;
    const double x = a + r * r * r;
    return f(x) * 3.0 * t * t / (om * om * om * om);
  };
  return quadrature(g, 0.0, 1.0, tol, opt);
}

// Integral over (-inf, inf), split at zero.
template <typename F>
double quadrature_real_line(F&& f, double tol, QuadratureOptions opt = {}) {
  const double right = quadrature_half_line(f, 0.0, tol / 2, opt);
  const double left =
      quadrature_half_line([&](double x) { return f(-x); }, 0.0, tol / 2, opt);
  return left + right;
}

// Bracketing root finder: secant proposals clipped to the bracket, bisection
// whenever the secant step stalls. Returns once the bracket width <= tol.
template <typename F>
double find_root(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  if (!(lo <= hi)) throw ConfigError("find_root: requires lo <= hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw ConfigError("find_root: no sign change on [lo, hi]");
  double x_prev = lo, f_prev = flo;
  double x_cur = hi, f_cur = fhi;
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo <= tol) break;
    double x_next;
    const double df = f_cur - f_prev;
    if (df != 0.0) {
      x_next = x_cur - f_cur * (x_cur - x_prev) / df;
    } else {
      x_next = 0.5 * (lo + hi);
    }
    // Reject secant steps that leave the bracket or barely move.
    const double margin = 0.01 * (hi - lo);
    if (!(x_next > lo + margin && x_next < hi - margin))
      x_next = 0.5 * (lo + hi);
    const double f_next = f(x_next);
    if (f_next == 0.0) return x_next;
    if ((f_next > 0.0) == (flo > 0.0)) {
      lo = x_next;
      flo = f_next;
    } else {
      hi = x_next;
      fhi = f_next;
    }
    x_prev = x_cur;
    f_prev = f_cur;
    x_cur = x_next;
    f_cur = f_next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rmt
