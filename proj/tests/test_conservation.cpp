#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backflow/conservation.hpp"
#include "backflow/scattering.hpp"
#include "support.hpp"

using namespace backflow;
using testing_support::Gen;

namespace {

ModeSuperposition random_state(Gen& gen, const DefectSpec& d, int modes) {
  std::vector<Mode> m;
  for (int i = 0; i < modes; ++i)
    m.push_back({gen.uniform(0.1, 3.0) + 3.0 * i, {gen.uniform(-1, 1), gen.uniform(-1, 1)}});
  return ModeSuperposition(m, d);
}

constexpr Quantity kAll[] = {Quantity::Energy, Quantity::Momentum, Quantity::Probability};

}  // namespace

TEST_CASE("superposition invariants") {
  CHECK_THROWS_AS(ModeSuperposition({}, DefectSpec::free()), ConfigError);
  CHECK_THROWS_AS(ModeSuperposition({{-1.0, 1.0}}, DefectSpec::free()), ConfigError);
  CHECK_THROWS_AS(ModeSuperposition({{0.0, 1.0}}, DefectSpec::free()), ConfigError);
  CHECK_THROWS_AS(ModeSuperposition({{1.0, 1.0}, {1.0, 2.0}}, DefectSpec::free()), ConfigError);
  CHECK_NOTHROW(ModeSuperposition({{1.0, 1.0}, {2.0, 2.0}}, DefectSpec::jump(1.0)));
  CHECK(std::string(to_string(Quantity::Momentum)) == "momentum");
}

TEST_CASE("boundary values of a single mode") {
  const auto d = DefectSpec::delta(1.0);
  const ModeSuperposition s({{1.0, 2.0}}, d);
  const BoundaryValues u = boundary_values(s, true, 0.0);
  const cplx u0 = 2.0 * branch(d, 1.0, Side::Left).value(0.0);
  CHECK(std::abs(u.f - u0) < 1e-15);
  CHECK(std::abs(u.fxx + u0) < 1e-15);
  CHECK(std::abs(u.ft - cplx{0, -0.5} * u0) < 1e-15);
  // Time dependence is a pure phase for one mode.
  const BoundaryValues later = boundary_values(s, true, 1.7);
  CHECK(std::abs(later.f - std::polar(1.0, -0.5 * 1.7) * u0) < 1e-15);
}

TEST_CASE("single jump mode conserves probability") {
  for (double t : {0.0, 0.4, 3.3}) {
    const ModeSuperposition s({{1.3, {0.7, -0.2}}}, DefectSpec::jump(2.5));
    CHECK(std::abs(boundary_rates(s, Quantity::Probability, t).residual()) <= 1e-13);
  }
}

TEST_CASE("two jump modes conserve the corrected energy") {
  Gen gen(31);
  const ModeSuperposition s = random_state(gen, DefectSpec::jump(3.0), 2);
  for (double t : {0.0, 0.7, 1.3}) {
    const RatePair r = boundary_rates(s, Quantity::Energy, t);
    CHECK(std::abs(r.residual()) <= 1e-12);
    // The correction is doing work: the bulk rate alone is not zero.
    CHECK(std::abs(r.bulk_flux_rate) > 1e-6);
  }
}

TEST_CASE("delta defect conserves probability without a correction") {
  Gen gen(32);
  const ModeSuperposition s = random_state(gen, DefectSpec::delta(2.0), 2);
  const RatePair r = boundary_rates(s, Quantity::Probability, 0.5);
  CHECK(std::abs(r.bulk_flux_rate) <= 1e-13);
  CHECK(r.defect_term_rate == cplx{});
}

TEST_CASE("delta momentum residual") {
  const ModeSuperposition one({{1.0, 1.0}}, DefectSpec::delta(1.0));
  const DeltaMomentumResidual r = delta_momentum_residual(one, 0.0);
  CHECK(std::abs(r.closed_form - (-1.0)) < 1e-15);
  CHECK(r.deviation() <= 1e-12);
  CHECK_FALSE(boundary_rates(one, Quantity::Momentum, 0.0).has_correction);

  // A single weak mode: only the -2 lambda^2 |v|^2 part survives.
  const ModeSuperposition weak({{1.0, 1.0}}, DefectSpec::delta(1e-8));
  CHECK(std::abs(delta_momentum_residual(weak, 0.0).flux_rate) <= 1e-15);
  CHECK(std::abs(delta_momentum_residual(weak, 0.0).closed_form) <= 1e-15);
  // With two modes the (v v*)_x part is first order in lambda.
  const ModeSuperposition weak2({{1.0, 1.0}, {2.5, 0.3}}, DefectSpec::delta(1e-8));
  CHECK(std::abs(delta_momentum_residual(weak2, 0.2).closed_form) <= 1e-7);
  CHECK(delta_momentum_residual(weak2, 0.2).deviation() <= 1e-15);

  Gen gen(33);
  const ModeSuperposition two = random_state(gen, DefectSpec::delta(2.0), 2);
  CHECK(delta_momentum_residual(two, 0.3).deviation() <= 1e-12);
  CHECK_THROWS_AS(delta_momentum_residual(random_state(gen, DefectSpec::jump(1.0), 2), 0.0),
                  UnsupportedError);
}

TEST_CASE("jump: all corrected quantities conserved for random states") {
  Gen gen(34);
  for (int trial = 0; trial < 100; ++trial) {
    const ModeSuperposition s = random_state(gen, DefectSpec::jump(gen.nonzero(0.01, 10.0)), 2 + trial % 2);
    const double t = gen.uniform(0.0, 2.0);
    for (Quantity q : kAll) {
      const RatePair r = boundary_rates(s, q, t);
      CHECK(r.has_correction);
      CHECK_MESSAGE(std::abs(r.residual()) <= 1e-12, to_string(q));
    }
  }
}

TEST_CASE("delta: energy and probability conserved, momentum residual closed form") {
  Gen gen(35);
  for (int trial = 0; trial < 100; ++trial) {
    const ModeSuperposition s = random_state(gen, DefectSpec::delta(gen.nonzero(0.01, 10.0)), 2 + trial % 2);
    const double t = gen.uniform(0.0, 2.0);
    CHECK(std::abs(boundary_rates(s, Quantity::Energy, t).residual()) <= 1e-12);
    CHECK(std::abs(boundary_rates(s, Quantity::Probability, t).residual()) <= 1e-13);
    CHECK(delta_momentum_residual(s, t).deviation() <= 1e-12);
  }
}

TEST_CASE("free particle conserves everything without corrections") {
  Gen gen(36);
  const ModeSuperposition s = random_state(gen, DefectSpec::free(), 3);
  for (Quantity q : kAll) {
    const RatePair r = boundary_rates(s, q, 0.9);
    CHECK(std::abs(r.bulk_flux_rate) <= 1e-13);
    CHECK(r.defect_term_rate == cplx{});
  }
}

TEST_CASE("rates repeat with the beat period of two modes") {
  Gen gen(37);
  for (int trial = 0; trial < 20; ++trial) {
    const double k1 = gen.uniform(0.2, 2.0), k2 = k1 + gen.uniform(0.2, 2.0);
    const double a = gen.nonzero(0.1, 5.0);
    const DefectSpec d = trial % 2 ? DefectSpec::jump(a) : DefectSpec::delta(a);
    const ModeSuperposition s({{k1, gen.complex_normal()}, {k2, gen.complex_normal()}}, d);
    const double period = 2.0 * kPi / (0.5 * k2 * k2 - 0.5 * k1 * k1);
    const double t = gen.uniform(0.0, 2.0);
    for (Quantity q : kAll) {
      const RatePair r0 = boundary_rates(s, q, t), r1 = boundary_rates(s, q, t + period);
      CHECK(std::abs(r0.bulk_flux_rate - r1.bulk_flux_rate) <= 1e-12);
      CHECK(std::abs(r0.defect_term_rate - r1.defect_term_rate) <= 1e-12);
    }
  }
}

TEST_CASE("fixing-term kernel agrees with the defect correction") {
  const GaussianTest centred(0.0, 0.1);
  CHECK(fixing_term_consistency(2.0, centred, {1, 3.0}) <= 1e-10);
  CHECK(fixing_term_consistency(-4.0, centred, {32, 40.0}, 9) <= 1e-10);
  CHECK(fixing_term_consistency(0.3, GaussianTest(0.1, 0.1), {32, 200.0}, 10) <= 1e-10);
  CHECK(fixing_term_consistency(1.5, GaussianTest(-2.0, 0.1), {32, 40.0}) == 0.0);
}
