#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmt/defaults.hpp"
#include "rmt/densities.hpp"
#include "rmt/estimators.hpp"
#include "rmt/runner.hpp"

using namespace rmt;

namespace {

Spectrum synthetic(std::vector<double> reals, std::vector<ComplexPair> pairs) {
  Spectrum s;
  s.real_eigs = std::move(reals);
  s.complex_pairs = std::move(pairs);
  s.n = static_cast<Index>(s.real_eigs.size() + 2 * s.complex_pairs.size());
  return s;
}

}  // namespace

TEST_CASE("estimate_rho_r on synthetic spectra") {
  // every eigenvalue at 0.5: all mass in one bin, density 1/binwidth
  std::vector<Spectrum> spectra(4, synthetic({0.5, 0.5}, {}));
  const HistSpec grid{0.0, 1.0, 4};
  const DensitySamples d = estimate_rho_r(spectra, grid, {});
  CHECK(d.rho[2] == doctest::Approx(4.0));
  CHECK(d.rho[0] == 0.0);

  double mass = 0.0;
  for (double r : d.rho) mass += r * d.binwidth;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("point-mass exclusions") {
  // 2-regular-graph style spectra: one lambda = 2 outlier per matrix
  std::vector<Spectrum> spectra;
  for (int t = 0; t < 6; ++t)
    spectra.push_back(synthetic({2.0, 0.3, -0.4, 1e-12}, {{0.1, 0.2}}));
  ExclusionPolicy policy;
  policy.perron_frobenius = 2.0;
  policy.exclude_zero = true;
  const RealAxisAccumulator acc =
      accumulate_rho_r(spectra, {-1.4, 1.4, 7}, policy);
  CHECK(acc.excluded_pf() == 6);    // exactly one per matrix
  CHECK(acc.excluded_zero() == 6);  // the 1e-12 value
  CHECK(acc.excluded_mass() == doctest::Approx(12.0 / 24.0));
  CHECK(acc.hist().total_in_range() == 12);

  // with the policy off nothing is excluded
  const RealAxisAccumulator off = accumulate_rho_r(spectra, {-1.4, 1.4, 7}, {});
  CHECK(off.excluded_mass() == 0.0);

  // everything excluded -> error
  std::vector<Spectrum> only_pf(3, synthetic({2.0}, {{0.1, 0.2}}));
  CHECK_THROWS_AS(accumulate_rho_r(only_pf, {-1.4, 1.4, 7}, policy).density(),
                  NumericalError);
}

TEST_CASE("strip estimator normalization") {
  // one pair inside the strip per matrix, at a known x
  std::vector<Spectrum> spectra(10, synthetic({0.9, -0.9}, {{0.0, 0.05}, {0.4, 0.8}}));
  const HistSpec grid{-1.0, 1.0, 4};
  const StripSpec strip{0.02, 0.1};
  const DensitySamples d = estimate_rho_c_axis(spectra, strip, grid);
  // 10 reps / (10 matrices * n=6 * 0.08 height * 0.5 binwidth) = 41.666...
  CHECK(d.rho[2] == doctest::Approx(10.0 / (10.0 * 6.0 * 0.08 * 0.5)));
  CHECK(d.rho[0] == 0.0);

  const StripSpec outside{2.0, 3.0};
  CHECK_THROWS_AS(estimate_rho_c_axis(spectra, outside, grid), NumericalError);
  CHECK_THROWS_AS((StripAccumulator{grid, StripSpec{-0.1, 0.2}}), ConfigError);
}

TEST_CASE("fit_sqrt_relation recovers a constructed constant") {
  DensitySamples r, c;
  r.binwidth = c.binwidth = 0.1;
  for (int i = 0; i < 9; ++i) {
    const double x = -0.4 + 0.1 * i;
    const double rc = 1.0 - 0.8 * x * x;
    r.x.push_back(x);
    c.x.push_back(x);
    c.rho.push_back(rc);
    r.rho.push_back(2.0 * std::sqrt(rc));  // rho_r = 2 sqrt(rho_c) exactly
  }
  const FitResult fit = fit_sqrt_relation(r, c);
  CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK(fit.bins_used == 7);  // edges dropped

  // all-zero rho_c -> no usable bins
  DensitySamples zero = c;
  for (auto& v : zero.rho) v = 0.0;
  CHECK_THROWS_AS(fit_sqrt_relation(r, zero), NumericalError);

  // fewer than 5 usable bins -> error
  DensitySamples r5 = r, c5 = c;
  for (std::size_t i = 4; i < c5.rho.size(); ++i) c5.rho[i] = 0.0;
  CHECK_THROWS_AS(fit_sqrt_relation(r5, c5), NumericalError);

  // grid mismatch -> config error
  DensitySamples shifted = c;
  shifted.x[0] += 0.01;
  CHECK_THROWS_AS(fit_sqrt_relation(r, shifted), ConfigError);
}

TEST_CASE("fit is scale-consistent") {
  DensitySamples r, c;
  Rng rng({40, 0});
  r.binwidth = c.binwidth = 0.05;
  for (int i = 0; i < 12; ++i) {
    r.x.push_back(0.05 * i);
    c.x.push_back(0.05 * i);
    const double rc = 0.5 + rng.uniform01();
    c.rho.push_back(rc);
    r.rho.push_back(0.7 * std::sqrt(rc) * (1.0 + 0.05 * (rng.uniform01() - 0.5)));
  }
  const FitResult base = fit_sqrt_relation(r, c);
  const double s = 3.0;
  DensitySamples scaled = c;
  for (auto& v : scaled.rho) v *= s * s;  // rho_c -> s^2 rho_c
  const FitResult after = fit_sqrt_relation(r, scaled);
  CHECK(after.alpha == doctest::Approx(base.alpha / s).epsilon(1e-12));
  CHECK(after.residual == doctest::Approx(base.residual).epsilon(1e-12));
}

TEST_CASE("score_against_catalog") {
  // uniform histogram vs the uniform prediction on the same support
  Histogram1D h(-1.0, 1.0, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 25; ++j) h.accumulate(h.center(i));
  const Score s = score_against_catalog(
      h, [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; });
  CHECK(s.l1 <= 1e-12);
  CHECK(s.ks <= 1e-12);

  // constant misplacement shows up in both metrics
  Histogram1D g(-1.0, 1.0, 8);
  for (int j = 0; j < 100; ++j) g.accumulate(-0.9);
  const Score bad = score_against_catalog(
      g, [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; });
  CHECK(bad.ks > 0.5);

  CHECK_THROWS_AS(score_against_catalog(g, [](double) { return 0.0; }),
                  NumericalError);
}

TEST_CASE("ks against quadrature cdf detects a shifted cauchy") {
  // pooled synthetic "empirical" data from the true Cauchy CDF inverse,
  // scored against a shifted prediction
  Histogram1D h(-10.0, 10.0, 101);
  Rng rng({41, 0});
  for (int i = 0; i < 20000; ++i)
    h.accumulate(std::tan(kPi * (rng.uniform01() - 0.5)));
  const auto cauchy = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
  const Score good = score_against_catalog(h, cauchy);
  CHECK(good.ks < 0.02);
  const auto shifted = [&](double x) { return cauchy(x - 0.8); };
  const Score bad = score_against_catalog(h, shifted);
  CHECK(bad.ks > 5 * good.ks);
}

TEST_CASE("runner determinism across thread counts") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::ginibre;
  spec.n = 24;
  const EnsembleRun a = run_ensemble(spec, 99, 16, 1);
  const EnsembleRun b = run_ensemble(spec, 99, 16, 3);
  REQUIRE(a.spectra.size() == b.spectra.size());
  for (std::size_t i = 0; i < a.spectra.size(); ++i) {
    REQUIRE(a.spectra[i].real_eigs == b.spectra[i].real_eigs);
    REQUIRE(a.spectra[i].complex_pairs.size() == b.spectra[i].complex_pairs.size());
    for (std::size_t j = 0; j < a.spectra[i].complex_pairs.size(); ++j) {
      CHECK(a.spectra[i].complex_pairs[j].x == b.spectra[i].complex_pairs[j].x);
      CHECK(a.spectra[i].complex_pairs[j].y == b.spectra[i].complex_pairs[j].y);
    }
  }

  const HistSpec grid{-1.1, 1.1, 21};
  const HistRun h1 = run_ensemble_hist(spec, 99, 16, 1, grid, {}, StripSpec{0.2, 0.5});
  const HistRun h4 = run_ensemble_hist(spec, 99, 16, 4, grid, {}, StripSpec{0.2, 0.5});
  CHECK(h1.real.hist().counts() == h4.real.hist().counts());
  CHECK(h1.strip->hist().counts() == h4.strip->hist().counts());
}

TEST_CASE("worker errors surface with the failing stream") {
  // k = n - 1 on six nodes: the only simple candidate is the complete
  // digraph, which five independent permutations hit with probability ~3e-7
  // per attempt; the rejection budget exhausts deterministically at this seed.
  EnsembleSpec spec;
  spec.kind = EnsembleKind::regular_digraph;
  spec.n = 6;
  spec.params = GraphParams{5};
  try {
    run_ensemble(spec, 1, 4, 2);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("stream") != std::string::npos);
    CHECK(std::string(e.what()).find("attempts") != std::string::npos);
  }
}

TEST_CASE("doubling trials shrinks the bin standard error like a Poisson count") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::ginibre;
  spec.n = 40;
  const HistSpec grid{-1.0, 1.0, 5};
  auto center_bin_density = [&](std::uint64_t seed, int trials) {
    const EnsembleRun run = run_ensemble(spec, seed, trials, 2);
    return estimate_rho_r(run.spectra, grid, {}).rho[2];
  };
  auto sd_over = [&](int trials) {
    double sum = 0.0, sum2 = 0.0;
    const int reps = 12;
    for (int r = 0; r < reps; ++r) {
      const double v = center_bin_density(1000 + r + (trials << 8), trials);
      sum += v;
      sum2 += v * v;
    }
    return std::sqrt(std::max(sum2 / reps - (sum / reps) * (sum / reps), 0.0));
  };
  const double s1 = sd_over(20);
  const double s4 = sd_over(80);  // 4x the trials: expect half the error
  CHECK(s4 < s1);
  CHECK(s1 / s4 == doctest::Approx(2.0).epsilon(0.75));
}

TEST_CASE("default policies per ensemble") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::regular_digraph;
  spec.n = 100;
  spec.params = GraphParams{2};
  const ExclusionPolicy p = default_exclusions(spec);
  CHECK(p.perron_frobenius == doctest::Approx(2.0));
  CHECK(p.exclude_zero);
  spec.params = GraphParams{3};
  CHECK(!default_exclusions(spec).exclude_zero);

  spec.kind = EnsembleKind::ginibre;
  const ExclusionPolicy g = default_exclusions(spec);
  CHECK(!g.perron_frobenius.has_value());

  const StripSpec strip = default_strip(spec);
  CHECK(strip.y_lo == doctest::Approx(0.3));
  CHECK(strip.y_hi == doctest::Approx(0.6));

  // spherical central-mass halfwidth: closed form tan(pi p/2)^k
  CHECK(spherical_central_halfwidth(1, 0.98) ==
        doctest::Approx(std::tan(kPi * 0.49)).epsilon(1e-12));
}
