#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backflow/scattering.hpp"
#include "support.hpp"

using namespace backflow;
using testing_support::Gen;

namespace {
constexpr cplx I{0.0, 1.0};
bool near(cplx a, cplx b, double tol = 1e-15) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("transmission and reflection") {
  auto c = coefficients(DefectSpec::free(), 1.0);
  CHECK(c.t == cplx{1.0});
  CHECK(c.r == cplx{0.0});

  c = coefficients(DefectSpec::delta(1.0), 1.0);
  CHECK(near(c.t, cplx{0.5, -0.5}));
  CHECK(near(c.r, cplx{-0.5, -0.5}));
  CHECK(std::norm(c.t) + std::norm(c.r) == doctest::Approx(1.0).epsilon(1e-15));

  c = coefficients(DefectSpec::jump(1.0), 1.0);
  CHECK(near(c.t, I));
  CHECK(c.r == cplx{0.0});

  CHECK_THROWS_AS(coefficients(DefectSpec::delta(1.0), 0.0), DomainError);
  CHECK_THROWS_AS(coefficients(DefectSpec::jump(1.0), -2.0), DomainError);
}

TEST_CASE("scattering states") {
  CHECK(near(scattering_state(DefectSpec::free(), 2.0, 0.25), std::polar(1.0, 0.5)));

  const auto d = DefectSpec::delta(1.0);
  const cplx u0 = branch(d, 1.0, Side::Left).value(0.0);
  const cplx v0 = branch(d, 1.0, Side::Right).value(0.0);
  CHECK(near(u0, cplx{0.5, -0.5}));
  CHECK(near(u0, v0));
  CHECK(near(scattering_state(d, 1.0, 0.0), u0));

  const auto j = DefectSpec::jump(1.0);
  const cplx ju = branch(j, 1.0, Side::Left).value(0.0);
  const cplx jv = branch(j, 1.0, Side::Right).value(0.0);
  CHECK(near(ju, 1.0));
  CHECK(near(jv, I));
  CHECK(std::abs(ju - jv) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(scattering_state(j, 1.0, 0.0), DomainError);
  CHECK(near(scattering_state(j, 1.0, -1e-300), 1.0));
}

TEST_CASE("sewing condition examples") {
  const auto j = DefectSpec::jump(1.0);
  CHECK(check_sewing(j, 1.0) <= 1e-14);
  const auto u = branch(j, 1.0, Side::Left), v = branch(j, 1.0, Side::Right);
  CHECK(near(u.derivative(0) - v.derivative(0), cplx{1.0, 1.0}, 1e-15));
  CHECK(near(1.0 * (u.value(0) + v.value(0)), cplx{1.0, 1.0}, 1e-15));
  CHECK(check_sewing(DefectSpec::delta(3.0), 2.0) <= 1e-14);
  CHECK(check_sewing(DefectSpec::free(), 5.0) == 0.0);
}

TEST_CASE("random unitarity, phase and sewing properties") {
  Gen gen(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const double k = gen.uniform(1e-3, 10.0);
    const auto d = DefectSpec::delta(gen.nonzero(1e-3, 10.0));
    const auto j = DefectSpec::jump(gen.nonzero(1e-3, 10.0));
    const auto cd = coefficients(d, k), cj = coefficients(j, k);
    CHECK(std::abs(std::norm(cd.t) + std::norm(cd.r) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(cj.t) - 1.0) <= 1e-12);
    CHECK(cj.r == cplx{0.0});
    CHECK(check_sewing(d, k) <= 1e-13);
    CHECK(check_sewing(j, k) <= 1e-13);
  }
}

TEST_CASE("branches solve the free Schroedinger equation away from the defect") {
  Gen gen(8);
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    // k >= 1 keeps the rounding error of the difference quotient below the bound.
    const double k = gen.uniform(1.0, 10.0);
    const DefectSpec defects[] = {DefectSpec::free(), DefectSpec::delta(gen.nonzero(0.1, 5.0)),
                                  DefectSpec::jump(gen.nonzero(0.1, 5.0))};
    for (const auto& d : defects) {
      const double x = gen.nonzero(0.05, 3.0);
      const cplx second = (scattering_state(d, k, x + h) - 2.0 * scattering_state(d, k, x) +
                           scattering_state(d, k, x - h)) /
                          (h * h);
      const cplx residual = -0.5 * second - 0.5 * k * k * scattering_state(d, k, x);
      CHECK(std::abs(residual) <= 1e-6 * k * k);
    }
  }
}

TEST_CASE("jump bound states") {
  const auto j = DefectSpec::jump(2.0);
  const auto states = bound_states(j);
  REQUIRE(states.size() == 2);
  bool right = false, left = false;
  for (const auto& s : states) {
    CHECK(s.decay_rate == 2.0);
    CHECK(s.energy_phase_rate == 2.0);
    CHECK(s.square_integrable);
    CHECK(check_bound_state_sewing(j, s) <= 1e-14);
    right = right || s.side == Side::Right;
    left = left || s.side == Side::Left;
    // vanishes on the other half-line, decays on its own
    const double outside = s.side == Side::Right ? -0.3 : 0.3;
    CHECK(s.value(2.0, outside, 0.4) == cplx{});
    const double inside = -outside;
    CHECK(std::abs(s.value(2.0, inside, 0.4)) == doctest::Approx(std::exp(-0.6)));
    CHECK(std::abs(s.value(2.0, 3 * inside, 0.4)) < std::abs(s.value(2.0, inside, 0.4)));
  }
  CHECK(right);
  CHECK(left);

  // For negative alpha the same exponents grow away from the defect.
  const auto neg = DefectSpec::jump(-2.0);
  const auto candidates = bound_state_candidates(neg);
  REQUIRE(candidates.size() == 2);
  for (const auto& s : candidates) {
    CHECK_FALSE(s.square_integrable);
    const double inside = s.side == Side::Right ? 0.3 : -0.3;
    CHECK(std::abs(s.value(-2.0, inside, 0.0)) > 1.0);
    CHECK(check_bound_state_sewing(neg, s) <= 1e-14);
  }
  CHECK(bound_states(neg).empty());
  CHECK_THROWS_AS(bound_states(DefectSpec::delta(1.0)), UnsupportedError);
}

TEST_CASE("delta bound state") {
  CHECK_FALSE(delta_bound_state(DefectSpec::delta(1.0)).has_value());
  const auto b = delta_bound_state(DefectSpec::delta(-0.5));
  REQUIRE(b.has_value());
  CHECK(b->kappa == 0.5);
  CHECK(b->energy == -0.125);
}
