#pragma once

#include <complex>

#include <Eigen/Dense>

#include "rmt/types.hpp"

// Partial real Schur decompositions: orthogonal similarities deflating either
// two real eigenvalues or one complex-conjugate pair to the leading block,
// plus the Jacobian factors of the induced change of variables. These are the
// building blocks behind the sqrt relation between the real and complex
// eigenvalue densities.

namespace rmt {

template <typename Scalar>
struct RealPairDecomposition {
  MatrixX<Scalar> q;   // orthogonal, n x n
  Scalar x1 = 0, x2 = 0, t12 = 0;
  MatrixX<Scalar> t1;  // 2 x (n-2) coupling block
  MatrixX<Scalar> y1;  // (n-2) x (n-2) trailing block

  MatrixX<Scalar> quasi_form() const {
    const Index n = q.rows();
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
    m(0, 0) = x1;
    m(0, 1) = t12;
    m(1, 1) = x2;
    if (n > 2) {
      m.block(0, 2, 2, n - 2) = t1;
      m.block(2, 2, n - 2, n - 2) = y1;
    }
    return m;
  }

  MatrixX<Scalar> reconstruct() const { return q * quasi_form() * q.transpose(); }
};

template <typename Scalar>
struct ComplexPairDecomposition {
  MatrixX<Scalar> q;  // orthogonal, n x n
  Scalar x = 0, y = 0;        // eigenvalue x + iy, y > 0
  Scalar b = 0, c = 0;        // off-diagonal entries of [[x, b], [-c, x]]
  Scalar eta = 0;             // b - c, the residual degree of freedom
  MatrixX<Scalar> t2;         // 2 x (n-2)
  MatrixX<Scalar> y2;         // (n-2) x (n-2)

  MatrixX<Scalar> quasi_form() const {
    const Index n = q.rows();
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
    m(0, 0) = x;
    m(0, 1) = b;
    m(1, 0) = -c;
    m(1, 1) = x;
    if (n > 2) {
      m.block(0, 2, 2, n - 2) = t2;
      m.block(2, 2, n - 2, n - 2) = y2;
    }
    return m;
  }

  MatrixX<Scalar> reconstruct() const { return q * quasi_form() * q.transpose(); }
};

namespace detail {

// Reflection sending v to a multiple of the axis-th coordinate vector, with
// the numerically stable sign choice. Explicit dense form; block sizes here
// stay small enough that rank-1 application buys nothing.
template <typename Scalar>
MatrixX<Scalar> householder_onto_axis(const VectorX<Scalar>& v, Index axis) {
  const Index n = v.size();
  MatrixX<Scalar> h = MatrixX<Scalar>::Identity(n, n);
  const Scalar norm = v.norm();
  if (norm == Scalar(0)) return h;
  const Scalar sign = v(axis) >= Scalar(0) ? Scalar(1) : Scalar(-1);
  VectorX<Scalar> w = v;
  w(axis) += sign * norm;  // reflects v onto -sign * norm * e_axis
  const Scalar wsq = w.squaredNorm();
  if (wsq == Scalar(0)) return h;
  h.noalias() -= (Scalar(2) / wsq) * w * w.transpose();
  return h;
}

// Inverse iteration with a fixed (possibly slightly noisy) shift. Converges
// to the invariant direction of the eigenvalue closest to the shift; the
// shift error only slows convergence, it does not bias the limit.
template <typename Scalar>
VectorX<Scalar> inverse_iteration(const MatrixX<Scalar>& a, Scalar shift,
                                  VectorX<Scalar> v, int iterations = 4) {
  const Index n = a.rows();
  MatrixX<Scalar> shifted = a - shift * MatrixX<Scalar>::Identity(n, n);
  Eigen::PartialPivLU<MatrixX<Scalar>> lu(shifted);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == Scalar(0)) {
    // Exactly singular shift: nudge by one ulp of the matrix scale.
    const Scalar nudge = std::numeric_limits<Scalar>::epsilon() *
                         std::max(Scalar(1), a.cwiseAbs().maxCoeff());
    shifted.diagonal().array() += nudge;
    lu.compute(shifted);
  }
  v.normalize();
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    const Scalar norm = v.norm();
    if (!(norm > Scalar(0)) || !v.allFinite())
      throw NumericalError("inverse_iteration: iterate collapsed");
    v /= norm;
  }
  return v;
}

template <typename Scalar>
using ComplexVec = VectorX<std::complex<Scalar>>;

template <typename Scalar>
ComplexVec<Scalar> inverse_iteration(const MatrixX<std::complex<Scalar>>& a,
                                     std::complex<Scalar> shift,
                                     ComplexVec<Scalar> v, int iterations = 4) {
  const Index n = a.rows();
  MatrixX<std::complex<Scalar>> shifted =
      a - shift * MatrixX<std::complex<Scalar>>::Identity(n, n);
  Eigen::PartialPivLU<MatrixX<std::complex<Scalar>>> lu(shifted);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == Scalar(0)) {
    const Scalar nudge = std::numeric_limits<Scalar>::epsilon() *
                         std::max(Scalar(1), a.cwiseAbs().maxCoeff());
    shifted.diagonal().array() += nudge;
    lu.compute(shifted);
  }
  v.normalize();
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    const Scalar norm = v.norm();
    if (!(norm > Scalar(0)) || !v.allFinite())
      throw NumericalError("inverse_iteration: iterate collapsed");
    v /= norm;
  }
  return v;
}

// Acceptance gate for claimed eigenvalues: generous enough for O(1e-8) input
// noise, tight enough to reject values that are not eigenvalues at all.
template <typename Scalar>
Scalar eigen_residual_tol(const MatrixX<Scalar>& x) {
  return Scalar(1e-6) * std::max(Scalar(1), x.norm());
}

// Seed vectors for inverse iteration, taken from the full Schur basis: the
// column whose diagonal block sits closest to the requested eigenvalue.
template <typename Scalar>
VectorX<Scalar> schur_seed(const MatrixX<Scalar>& t, const MatrixX<Scalar>& u,
                           std::complex<Scalar> target) {
  Index best = 0;
  Scalar best_dist = std::numeric_limits<Scalar>::max();
  const Index n = t.rows();
  Index i = 0;
  while (i < n) {
    std::complex<Scalar> block_eig;
    Index width = 1;
    if (i < n - 1 && t(i + 1, i) != Scalar(0)) {
      const Scalar mean = (t(i, i) + t(i + 1, i + 1)) / Scalar(2);
      const Scalar hd = (t(i, i) - t(i + 1, i + 1)) * (t(i, i) - t(i + 1, i + 1)) / Scalar(4) +
                        t(i, i + 1) * t(i + 1, i);
      block_eig = hd >= Scalar(0)
                      ? std::complex<Scalar>(mean + std::sqrt(hd), Scalar(0))
                      : std::complex<Scalar>(mean, std::sqrt(-hd));
      width = 2;
    } else {
      block_eig = std::complex<Scalar>(t(i, i), Scalar(0));
    }
    const Scalar dist = std::abs(block_eig - target);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
    i += width;
  }
  return u.col(best);
}

}  // namespace detail

// Deflates two simple real eigenvalues of x to the leading 2x2 triangle via a
// composition of two Householder reflections. The reported x1, x2 are read
// back from the transformed matrix, so O(1e-8) noise on the inputs does not
// leak into the blocks.
template <typename Scalar>
RealPairDecomposition<Scalar> partial_schur_real_pair(const MatrixX<Scalar>& x,
                                                      Scalar lambda1,
                                                      Scalar lambda2) {
  const Index n = x.rows();
  if (n < 2 || x.cols() != n)
    throw ConfigError("partial_schur_real_pair: matrix must be square with n >= 2");
  const Scalar tol = detail::eigen_residual_tol(x);

  Eigen::RealSchur<MatrixX<Scalar>> schur(x, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("partial_schur_real_pair: Schur factorization failed");

  // First eigenvector, full size.
  VectorX<Scalar> v1 = detail::inverse_iteration(
      x, lambda1,
      detail::schur_seed(schur.matrixT(), schur.matrixU(),
                         std::complex<Scalar>(lambda1, Scalar(0))));
  if ((x * v1 - lambda1 * v1).norm() > tol)
    throw NumericalError("partial_schur_real_pair: lambda1 failed the eigenvalue residual test");
  MatrixX<Scalar> h1 = detail::householder_onto_axis(v1, 0);

  MatrixX<Scalar> m = h1 * x * h1;

  // Second eigenvector inside the deflated trailing block.
  const MatrixX<Scalar> trailing = m.bottomRightCorner(n - 1, n - 1);
  VectorX<Scalar> seed = VectorX<Scalar>::Ones(n - 1);
  VectorX<Scalar> v2 = detail::inverse_iteration(trailing, lambda2, seed);
  if ((trailing * v2 - lambda2 * v2).norm() > tol)
    throw NumericalError("partial_schur_real_pair: lambda2 failed the eigenvalue residual test");
  MatrixX<Scalar> h2 = MatrixX<Scalar>::Identity(n, n);
  h2.bottomRightCorner(n - 1, n - 1) = detail::householder_onto_axis(v2, 0);
  m = h2 * m * h2;
  h1 = (h1 * h2).eval();  // accumulate O = H1 * H2

  RealPairDecomposition<Scalar> out;
  out.q = h1;
  out.x1 = m(0, 0);
  out.t12 = m(0, 1);
  out.x2 = m(1, 1);
  if (n > 2) {
    out.t1 = m.block(0, 2, 2, n - 2);
    out.y1 = m.block(2, 2, n - 2, n - 2);
  } else {
    out.t1 = MatrixX<Scalar>(2, 0);
    out.y1 = MatrixX<Scalar>(0, 0);
  }
  return out;
}

// Deflates one conjugate pair x +- iy to the leading 2x2 block
// [[x, b], [-c, x]] with y^2 = b c: two Householder reflections map an
// orthonormal basis of the invariant real 2-plane onto (e1, e2), then a
// Givens rotation inside that plane equalizes the diagonal.
template <typename Scalar>
ComplexPairDecomposition<Scalar> partial_schur_complex_pair(
    const MatrixX<Scalar>& x, Scalar eig_x, Scalar eig_y) {
  using Complex = std::complex<Scalar>;
  const Index n = x.rows();
  if (n < 2 || x.cols() != n)
    throw ConfigError("partial_schur_complex_pair: matrix must be square with n >= 2");
  if (!(eig_y > Scalar(0)))
    throw ConfigError("partial_schur_complex_pair: requires y > 0");
  const Scalar tol = detail::eigen_residual_tol(x);
  const Complex z(eig_x, eig_y);

  Eigen::RealSchur<MatrixX<Scalar>> schur(x, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("partial_schur_complex_pair: Schur factorization failed");

  const MatrixX<Complex> xc = x.template cast<Complex>();
  detail::ComplexVec<Scalar> seed =
      detail::schur_seed(schur.matrixT(), schur.matrixU(), z)
          .template cast<Complex>();
  detail::ComplexVec<Scalar> v = detail::inverse_iteration(xc, z, seed);
  if ((xc * v - z * v).norm() > tol)
    throw NumericalError("partial_schur_complex_pair: (x, y) failed the eigenvalue residual test");

  // Rotate the complex phase so Re v and Im v are orthogonal, then normalize
  // each; together they span the invariant plane.
  VectorX<Scalar> u1 = v.real();
  VectorX<Scalar> u2 = v.imag();
  const Scalar cross = u1.dot(u2);
  const Scalar diff = u1.squaredNorm() - u2.squaredNorm();
  const Scalar theta = Scalar(0.5) * std::atan2(Scalar(-2) * cross, diff);
  const Scalar ct = std::cos(theta), st = std::sin(theta);
  VectorX<Scalar> q1 = ct * u1 - st * u2;
  VectorX<Scalar> q2 = st * u1 + ct * u2;
  if (q1.norm() == Scalar(0) || q2.norm() == Scalar(0))
    throw NumericalError("partial_schur_complex_pair: degenerate invariant plane (y ~ 0?)");
  q1.normalize();
  q2.normalize();

  MatrixX<Scalar> h1 = detail::householder_onto_axis(q1, 0);
  VectorX<Scalar> w = h1 * q2;  // first component is ~0 by orthogonality
  MatrixX<Scalar> h2 = MatrixX<Scalar>::Identity(n, n);
  {
    VectorX<Scalar> tail = w.segment(1, n - 1);
    h2.bottomRightCorner(n - 1, n - 1) = detail::householder_onto_axis(tail, 0);
  }
  MatrixX<Scalar> q = (h1 * h2).eval();
  MatrixX<Scalar> m = q.transpose() * x * q;

  // Eigenvalues of the leading block, before standardization; they must be
  // the requested conjugate pair.
  const Scalar p = m(0, 0), qq = m(0, 1), r = m(1, 0), s = m(1, 1);
  const Scalar half_disc = (p - s) * (p - s) / Scalar(4) + qq * r;
  if (!(half_disc < Scalar(0)))
    throw NumericalError("partial_schur_complex_pair: leading block has real eigenvalues");
  const Scalar y_block = std::sqrt(-half_disc);

  // In-plane Givens rotation equalizing the diagonal entries.
  const Scalar phi = Scalar(0.5) * std::atan2(s - p, qq + r);
  MatrixX<Scalar> g = MatrixX<Scalar>::Identity(n, n);
  g(0, 0) = std::cos(phi);
  g(0, 1) = -std::sin(phi);
  g(1, 0) = std::sin(phi);
  g(1, 1) = std::cos(phi);
  q = (q * g).eval();
  m = g.transpose() * m * g;

  if (m(0, 1) < Scalar(0)) {
    // Flip the second basis vector to make b > 0 (and hence c > 0).
    q.col(1) = -q.col(1);
    m.row(1) = -m.row(1);
    m.col(1) = -m.col(1);
  }

  ComplexPairDecomposition<Scalar> out;
  out.q = q;
  out.x = (m(0, 0) + m(1, 1)) / Scalar(2);
  out.y = y_block;
  out.b = m(0, 1);
  out.c = -m(1, 0);
  out.eta = out.b - out.c;
  if (n > 2) {
    out.t2 = m.block(0, 2, 2, n - 2);
    out.y2 = m.block(2, 2, n - 2, n - 2);
  } else {
    out.t2 = MatrixX<Scalar>(2, 0);
    out.y2 = MatrixX<Scalar>(0, 0);
  }
  return out;
}

// Shifted determinant of a real matrix: det(x I - Y), with the empty-matrix
// convention det = 1.
template <typename Derived>
typename Derived::Scalar shifted_det(typename Derived::Scalar x,
                                     const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  if (y.rows() != y.cols()) throw ConfigError("shifted_det: Y must be square");
  if (y.rows() == 0) return Scalar(1);
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(y.rows(), y.rows());
  return (x * id - y).determinant();
}

// |det((x + iy) I - Y)|^2 for real Y. At y = 0 the determinant is real and
// the value reduces to det(x I - Y)^2 exactly; evaluating that case through
// complex LU would only add rounding noise, so it is routed through the real
// path. This makes the degeneracy identity with the real-pair factor hold
// bit-exactly.
template <typename Derived>
typename Derived::Scalar shifted_det_sq_modulus(
    typename Derived::Scalar x, typename Derived::Scalar y,
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  if (m.rows() != m.cols())
    throw ConfigError("shifted_det_sq_modulus: Y must be square");
  if (m.rows() == 0) return Scalar(1);
  if (y == Scalar(0)) {
    const Scalar d = shifted_det(x, m);
    return d * d;
  }
  const MatrixX<Complex> shifted =
      Complex(x, y) * MatrixX<Complex>::Identity(m.rows(), m.rows()) -
      m.template cast<Complex>();
  return std::norm(shifted.determinant());
}

// Jacobian of the flat measure under the real-pair deflation:
// |x1 - x2| |det(x1 - Y) det(x2 - Y)|; an empty Y contributes 1.
template <typename Derived>
typename Derived::Scalar jacobian_real_pair(typename Derived::Scalar x1,
                                            typename Derived::Scalar x2,
                                            const Eigen::MatrixBase<Derived>& y) {
  return std::abs(x1 - x2) * std::abs(shifted_det(x1, y) * shifted_det(x2, y));
}

// Jacobian of the flat measure under the complex-pair deflation:
// (2 |eta y| / sqrt(eta^2 + 4 y^2)) |det((x + iy) - Y)|^2, zero whenever the
// pair degenerates (eta = 0 or y = 0).
template <typename Derived>
typename Derived::Scalar jacobian_complex_pair(
    typename Derived::Scalar x, typename Derived::Scalar y,
    typename Derived::Scalar eta, const Eigen::MatrixBase<Derived>& y2) {
  using Scalar = typename Derived::Scalar;
  const Scalar num = Scalar(2) * std::abs(eta * y);
  if (num == Scalar(0)) return Scalar(0);  // limit value at the degeneracy
  return num / std::sqrt(eta * eta + Scalar(4) * y * y) *
         shifted_det_sq_modulus(x, y, y2);
}

}  // namespace rmt
