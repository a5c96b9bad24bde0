#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "backflow/core.hpp"
#include "backflow/parallel.hpp"

using namespace backflow;

TEST_CASE("midpoint grid nodes") {
  CHECK(make_grid({2, 2.0}) == std::vector<double>{0.5, 1.5});
  CHECK(make_grid({4, 200.0}) == std::vector<double>{25.0, 75.0, 125.0, 175.0});
  const auto nodes = make_grid({2000, 200.0});
  CHECK(nodes.front() == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(nodes.back() == doctest::Approx(199.95).epsilon(1e-15));
}

TEST_CASE("grid nodes are positive and strictly increasing") {
  for (std::size_t n : {1u, 2u, 3u, 17u, 500u}) {
    for (double p : {0.1, 2.0, 200.0}) {
      const auto k = make_grid({n, p});
      REQUIRE(k.size() == n);
      CHECK(k.front() > 0.0);
      for (std::size_t i = 1; i < n; ++i) CHECK(k[i] > k[i - 1]);
    }
  }
}

TEST_CASE("invalid grids are configuration errors") {
  CHECK_THROWS_AS(make_grid({0, 2.0}), ConfigError);
  CHECK_THROWS_AS(make_grid({4, 0.0}), ConfigError);
  CHECK_THROWS_AS(make_grid({4, -1.0}), ConfigError);
  CHECK_THROWS_AS(make_grid({4, NAN}), ConfigError);
  CHECK_NOTHROW(make_grid({1, 2.0}));
}

TEST_CASE("defect specifications") {
  CHECK(DefectSpec::free().kind() == DefectKind::Free);
  const auto d = DefectSpec::delta(-0.5);
  CHECK(d.kind() == DefectKind::Delta);
  CHECK(d.strength() == -0.5);
  CHECK_FALSE(d.conserved());
  CHECK(DefectSpec::jump(3.0, true).conserved());

  SUBCASE("zero strength must be requested as free") {
    try {
      DefectSpec::jump(0.0);
      FAIL("no exception");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("--defect free") != std::string::npos);
    }
    CHECK_THROWS_AS(DefectSpec::delta(0.0), ConfigError);
  }
  SUBCASE("non-finite strength") {
    CHECK_THROWS_AS(DefectSpec::delta(INFINITY), ConfigError);
    CHECK_THROWS_AS(DefectSpec::jump(NAN), ConfigError);
  }
  SUBCASE("conserved flag is jump only") {
    CHECK_THROWS_AS(DefectSpec::make(DefectKind::Delta, 1.0, true), ConfigError);
    CHECK_THROWS_AS(DefectSpec::make(DefectKind::Free, 0.0, true), ConfigError);
  }
  CHECK(parse_defect_kind("jump") == DefectKind::Jump);
  CHECK_THROWS_AS(parse_defect_kind("square"), ConfigError);
  CHECK(to_string(DefectKind::Delta) == "delta");
}

TEST_CASE("Gaussian test function") {
  const GaussianTest f(0.0, 0.1);
  CHECK(f(0.0) == doctest::Approx(3.989422804014327).epsilon(1e-14));
  CHECK(f(1.0) == 0.0);
  CHECK(GaussianTest(0.5, 0.1)(0.5) == doctest::Approx(3.989422804014327).epsilon(1e-14));
  CHECK(f.support_lo() == doctest::Approx(-0.8));
  CHECK(f.support_hi() == doctest::Approx(0.8));
  CHECK_THROWS_AS(GaussianTest(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(GaussianTest(0.0, 0.1, -1.0), ConfigError);

  // Trapezoid mass: 1 minus the truncated tails, erfc(c / sqrt 2).
  for (double c : {2.0, 4.0, 8.0}) {
    const GaussianTest g(0.3, 0.1, c);
    const std::size_t cells = 200000;
    const double h = (g.support_hi() - g.support_lo()) / cells;
    double mass = 0.5 * (g(g.support_lo()) + g(g.support_hi()));
    for (std::size_t i = 1; i < cells; ++i) mass += g(g.support_lo() + h * static_cast<double>(i));
    mass *= h;
    CHECK(std::abs(mass - (1.0 - std::erfc(c / std::sqrt(2.0)))) < 1e-9);
  }
}

TEST_CASE("complex matrix value semantics") {
  ComplexMatrix a(2, {1.0, cplx{0, 1}, cplx{0, -1}, 2.0});
  CHECK(a(0, 1) == cplx{0, 1});
  CHECK(a.row(1)[1] == cplx{2.0});
  ComplexMatrix b = a;
  CHECK(a == b);
  b(1, 1) = 3.0;
  CHECK_FALSE(a == b);
  CHECK_THROWS_AS(ComplexMatrix(2, {1.0, 2.0, 3.0}), ConfigError);
}

TEST_CASE("thread count resolution and parallel_for") {
  CHECK(resolve_threads(3) == 3u);
  CHECK(resolve_threads(0) >= 1u);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericalError("boom");
                               }),
                  NumericalError);
}
