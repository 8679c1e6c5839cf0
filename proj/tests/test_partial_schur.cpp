#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle_helpers.hpp"
#include "rmt/ensembles.hpp"
#include "rmt/partial_schur.hpp"
#include "rmt/schur_check.hpp"
#include "rmt/spectrum.hpp"

using namespace rmt;
using Eigen::MatrixXd;

TEST_CASE("real pair on the 2x2 symmetric fixture") {
  MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  const auto d = partial_schur_real_pair<double>(x, 1.0, -1.0);
  CHECK(d.x1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.x2 == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(d.t12) < 1e-14);
  CHECK(d.y1.rows() == 0);
  CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
  CHECK((d.q.transpose() * d.q - MatrixXd::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("real pair on a matrix already in deflated form") {
  MatrixXd x = MatrixXd::Zero(4, 4);
  x(0, 0) = 2.0;
  x(0, 1) = 0.7;
  x(1, 1) = -3.0;
  x.block(0, 2, 2, 2) << 0.1, 0.2, 0.3, 0.4;
  x.block(2, 2, 2, 2) << 0.0, 0.5, -0.5, 0.0;  // trailing rotation block
  const auto d = partial_schur_real_pair<double>(x, 2.0, -3.0);
  CHECK(d.x1 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d.x2 == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(std::abs(std::abs(d.t12) - 0.7) < 1e-12);  // O unique only up to signs
  CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
  // blocks agree up to signs: compare O-invariant quantities
  const Spectrum tail = compute_spectrum(d.y1).spectrum;
  REQUIRE(tail.complex_pairs.size() == 1);
  CHECK(tail.complex_pairs[0].y == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("real pair rejects values that are not eigenvalues") {
  MatrixXd x(3, 3);
  x << 0, 1, 0, -1, 0, 0, 0, 0, 2;
  CHECK_THROWS_AS(partial_schur_real_pair<double>(x, 0.5, 2.0), NumericalError);
}

TEST_CASE("real pair tolerates 1e-8 noise on the eigenvalues") {
  const MatrixXd x = sample_ginibre(12, {31, 4});
  const Spectrum s = compute_spectrum(x).spectrum;
  REQUIRE(s.real_eigs.size() >= 2);
  const auto [mn, mx] = std::minmax_element(s.real_eigs.begin(), s.real_eigs.end());
  const auto d = partial_schur_real_pair<double>(x, *mn + 1e-8, *mx - 1e-8);
  CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
  CHECK(d.x1 == doctest::Approx(*mn).epsilon(1e-9));
  CHECK(d.x2 == doctest::Approx(*mx).epsilon(1e-9));
}

TEST_CASE("complex pair on the rotation fixture") {
  MatrixXd x(2, 2);
  x << 0, 1, -1, 0;
  const auto d = partial_schur_complex_pair<double>(x, 0.0, 1.0);
  CHECK(d.x == doctest::Approx(0.0));
  CHECK(d.y == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.b == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(d.eta) <= 1e-15);  // already standardized
  CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
}

TEST_CASE("complex pair on the scaled rotation") {
  MatrixXd x(2, 2);
  x << 0, 2, -0.5, 0;  // eigenvalues +-i with b c = 1
  const auto d = partial_schur_complex_pair<double>(x, 0.0, 1.0);
  CHECK(d.b * d.c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.b == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.c == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.eta == doctest::Approx(1.5).epsilon(1e-12));
  CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
}

TEST_CASE("complex pair input validation") {
  MatrixXd x(2, 2);
  x << 0, 1, -1, 0;
  CHECK_THROWS_AS(partial_schur_complex_pair<double>(x, 0.0, -1.0), ConfigError);
  CHECK_THROWS_AS(partial_schur_complex_pair<double>(x, 0.5, 0.25), NumericalError);
}

TEST_CASE("random 8x8 decompositions agree with the full-spectrum oracle") {
  int real_done = 0, complex_done = 0;
  for (int trial = 0; trial < 30 && (real_done < 8 || complex_done < 8); ++trial) {
    const MatrixXd x = sample_ginibre(8, {32, static_cast<std::uint64_t>(trial)});
    const auto roots = oracle::eigenvalues_by_char_poly(x);

    std::vector<double> reals;
    std::vector<std::complex<double>> pairs;
    for (const auto& r : roots) {
      if (std::abs(r.imag()) < 1e-9)
        reals.push_back(r.real());
      else if (r.imag() > 0)
        pairs.push_back(r);
    }

    if (reals.size() >= 2 && real_done < 8) {
      std::sort(reals.begin(), reals.end());
      const auto d = partial_schur_real_pair<double>(x, reals.front(), reals.back());
      CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
      // eig(Y1) must be the remaining eigenvalues
      auto rest = oracle::eigenvalues_by_char_poly(d.y1);
      rest.emplace_back(d.x1, 0.0);
      rest.emplace_back(d.x2, 0.0);
      CHECK(oracle::multiset_distance(rest, roots) < 1e-8);
      ++real_done;
    }
    if (!pairs.empty() && complex_done < 8) {
      const auto best = *std::max_element(
          pairs.begin(), pairs.end(),
          [](const auto& a, const auto& b) { return a.imag() < b.imag(); });
      const auto d = partial_schur_complex_pair<double>(x, best.real(), best.imag());
      CHECK((x - d.reconstruct()).norm() <= 1e-12 * x.norm());
      CHECK(std::abs(d.y * d.y - d.b * d.c) <= 1e-10 * d.y * d.y);
      auto rest = oracle::eigenvalues_by_char_poly(d.y2);
      rest.emplace_back(d.x, d.y);
      rest.emplace_back(d.x, -d.y);
      CHECK(oracle::multiset_distance(rest, roots) < 1e-8);
      ++complex_done;
    }
  }
  CHECK(real_done >= 8);
  CHECK(complex_done >= 8);
}

TEST_CASE("jacobian of the real pair") {
  MatrixXd y1(1, 1);
  y1 << 0.0;
  CHECK(jacobian_real_pair(1.0, -1.0, y1) == doctest::Approx(2.0));
  CHECK(jacobian_real_pair(1.0, -1.0, MatrixXd(0, 0)) == doctest::Approx(2.0));
  CHECK(jacobian_real_pair(0.7, 0.7, y1) == 0.0);  // eigenvalue collision

  // symmetry in (x1, x2)
  const MatrixXd y = sample_ginibre(5, {33, 0});
  CHECK(jacobian_real_pair(0.3, -1.2, y) == jacobian_real_pair(-1.2, 0.3, y));
}

TEST_CASE("jacobian of the complex pair") {
  CHECK(jacobian_complex_pair(0.0, 1.0, 2.0, MatrixXd(0, 0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));  // 4/sqrt(8)
  const MatrixXd y = sample_ginibre(4, {34, 0});
  CHECK(jacobian_complex_pair(0.4, 1.3, 0.0, y) == 0.0);  // eta = 0
  CHECK(jacobian_complex_pair(0.4, 0.0, 1.3, y) == 0.0);  // pair on the axis

  // degeneracy link: at y = 0 the squared char-poly modulus equals the
  // square of the real-pair determinant factor, exactly
  const double det = shifted_det(0.4, y);
  CHECK(shifted_det_sq_modulus(0.4, 0.0, y) == det * det);
  // and decays to zero as the pair approaches the axis
  double prev = jacobian_complex_pair(0.4, 1e-2, 1.3, y);
  for (double yy : {1e-4, 1e-8, 1e-12}) {
    const double cur = jacobian_complex_pair(0.4, yy, 1.3, y);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("property suite up to n = 64") {
  for (int n : {8, 16, 64}) {
    const SchurCheckReport rep = schur_check(n, n == 64 ? 5 : 20, 35);
    CAPTURE(n);
    CHECK(rep.max_reconstruction_rel <= 1e-12);
    CHECK(rep.max_orthogonality_defect <= 1e-12);
    CHECK(rep.max_y2_bc_rel <= 1e-10);
    CHECK(rep.max_spectral_mismatch <= 1e-8);
    CHECK(rep.degeneracies_exact);
    CHECK(rep.ok());
  }
}
