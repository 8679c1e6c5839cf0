#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmt/rng.hpp"
#include "rmt/types.hpp"

using namespace rmt;

TEST_CASE("histogram accumulate") {
  Histogram1D h(0.0, 1.0, 2);
  h.accumulate(0.25);
  CHECK(h.count(0) == 1);
  CHECK(h.count(1) == 0);
  CHECK(h.overflow() == 0);

  h.accumulate(1.5);  // out of range goes to overflow, never dropped
  CHECK(h.count(0) == 1);
  CHECK(h.count(1) == 0);
  CHECK(h.overflow() == 1);

  h.accumulate(0.75);
  CHECK(h.count(0) == 1);
  CHECK(h.count(1) == 1);

  // hi edge is exclusive, lo edge inclusive
  h.accumulate(1.0);
  CHECK(h.overflow() == 2);
  h.accumulate(0.0);
  CHECK(h.count(0) == 2);
}

TEST_CASE("histogram merge") {
  Histogram1D a(0.0, 1.0, 2), b(0.0, 1.0, 2);
  a.accumulate(0.1);
  b.accumulate(0.6);
  b.accumulate(0.7);
  const Histogram1D m = merge(a, b);
  CHECK(m.count(0) == 1);
  CHECK(m.count(1) == 2);

  const Histogram1D empty(0.0, 1.0, 2);
  const Histogram1D id = merge(a, empty);
  CHECK(id.count(0) == a.count(0));
  CHECK(id.count(1) == a.count(1));
  CHECK(id.overflow() == a.overflow());

  Histogram1D other(0.0, 2.0, 2);
  CHECK_THROWS_AS(merge(a, other), ConfigError);
}

TEST_CASE("histogram merge is associative and commutative on random counts") {
  Rng rng({42, 0});
  for (int rep = 0; rep < 50; ++rep) {
    Histogram1D a(0.0, 1.0, 8), b(0.0, 1.0, 8), c(0.0, 1.0, 8);
    auto fill = [&](Histogram1D& h) {
      const int n = static_cast<int>(rng.uniform_below(40));
      for (int i = 0; i < n; ++i) h.accumulate(rng.uniform01() * 1.2);  // some overflow
      h.add_weight(1);
    };
    fill(a);
    fill(b);
    fill(c);
    const Histogram1D left = merge(merge(a, b), c);
    const Histogram1D right = merge(a, merge(b, c));
    const Histogram1D swapped = merge(b, a);
    for (int i = 0; i < 8; ++i) {
      CHECK(left.count(i) == right.count(i));
      CHECK(swapped.count(i) == merge(a, b).count(i));
    }
    CHECK(left.overflow() == right.overflow());
    CHECK(left.weight() == right.weight());
  }
}

TEST_CASE("density normalization") {
  Histogram1D h(0.0, 1.0, 2);
  h.accumulate(0.1);
  h.accumulate(0.2);
  h.accumulate(0.6);
  h.accumulate(0.7);
  const DensitySamples d = to_density(h, Normalization::unit_mass);
  CHECK(d.rho[0] == doctest::Approx(1.0));
  CHECK(d.rho[1] == doctest::Approx(1.0));

  Histogram1D g(0.0, 1.0, 2);
  g.accumulate(0.1);
  g.accumulate(0.2);
  g.accumulate(0.3);
  g.accumulate(0.6);
  const DensitySamples e = to_density(g, Normalization::unit_mass);
  CHECK(e.rho[0] == doctest::Approx(1.5));
  CHECK(e.rho[1] == doctest::Approx(0.5));

  Histogram1D empty(0.0, 1.0, 2);
  CHECK_THROWS_AS(to_density(empty, Normalization::unit_mass), NumericalError);
}

TEST_CASE("density integrates to one for random histograms") {
  Rng rng({7, 1});
  for (int rep = 0; rep < 40; ++rep) {
    const int bins = 1 + static_cast<int>(rng.uniform_below(30));
    Histogram1D h(-2.0, 3.0, bins);
    const int n = 1 + static_cast<int>(rng.uniform_below(200));
    for (int i = 0; i < n; ++i) h.accumulate(-2.0 + 5.0 * rng.uniform01());
    const DensitySamples d = to_density(h, Normalization::unit_mass);
    double mass = 0.0;
    for (double r : d.rho) mass += r * d.binwidth;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("per-matrix normalization") {
  Histogram1D h(0.0, 1.0, 4);
  for (int i = 0; i < 8; ++i) h.accumulate(0.3);
  h.add_weight(2);  // two source matrices
  const DensitySamples d = to_density(h, Normalization::per_matrix, 4.0);
  // 8 counts / (2 matrices * 0.25 binwidth * scale 4) = 4
  CHECK(d.rho[1] == doctest::Approx(4.0));
}

TEST_CASE("spectrum cardinality") {
  Spectrum s;
  s.n = 4;
  s.real_eigs = {1.0, -1.0};
  s.complex_pairs = {{0.0, 1.0}};
  CHECK(s.cardinality_ok());
  CHECK(count_real(s) == 2);
  s.complex_pairs.clear();
  CHECK(!s.cardinality_ok());
}

TEST_CASE("ensemble validation") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::rajan_abbott;
  spec.n = 100;
  spec.params = RajanAbbottParams{1.5, 0.15, 0.9};
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec.params = RajanAbbottParams{0.8, 0.15, 0.9};
  CHECK_NOTHROW(validate(spec));

  spec.kind = EnsembleKind::ginibre_diffusion;
  spec.n = 99;
  spec.params = DiffusionParams{1.0};
  CHECK_THROWS_AS(validate(spec), ConfigError);

  spec.kind = EnsembleKind::regular_digraph;
  spec.n = 10;
  spec.params = GraphParams{10};
  CHECK_THROWS_AS(validate(spec), ConfigError);

  CHECK_THROWS_AS(parse_ensemble_kind("nope"), ConfigError);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a({123, 5}), b({123, 5}), c({123, 6});
  bool all_equal = true, any_equal_cross = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.gaussian(), vb = b.gaussian(), vc = c.gaussian();
    all_equal = all_equal && (va == vb);
    any_equal_cross = any_equal_cross || (va == vc);
  }
  CHECK(all_equal);
  CHECK(!any_equal_cross);
}

TEST_CASE("rng uniform_below stays in range and covers") {
  Rng rng({9, 0});
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_below(7);
    REQUIRE(v < 7);
    ++seen[static_cast<std::size_t>(v)];
  }
  for (int count : seen) CHECK(count > 200);
}
