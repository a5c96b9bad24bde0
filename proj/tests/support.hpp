#pragma once

// Shared test helpers: a seeded generator and independent numerical oracles.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "backflow/core.hpp"
#include "backflow/quadrature.hpp"
#include "backflow/scattering.hpp"

namespace testing_support {

using backflow::cplx;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  // Random sign times a magnitude in [lo, hi].
  double nonzero(double lo, double hi) {
    const double m = uniform(lo, hi);
    return uniform(0.0, 1.0) < 0.5 ? -m : m;
  }
  cplx complex_normal() {
    std::normal_distribution<double> n;
    return {n(rng), n(rng)};
  }
  std::vector<cplx> complex_vector(std::size_t n) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = complex_normal();
    return v;
  }
};

// Composite midpoint rule over the truncated support clipped to one side.
inline cplx midpoint_halfline(backflow::Side side, double q, const backflow::GaussianTest& test,
                              std::size_t cells) {
  double lo = test.support_lo(), hi = test.support_hi();
  if (side == backflow::Side::Left) hi = std::min(hi, 0.0);
  else lo = std::max(lo, 0.0);
  if (hi <= lo) return {};
  const double h = (hi - lo) / static_cast<double>(cells);
  cplx sum{};
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * h;
    const double z = (x - test.x0()) / test.sigma();
    const double f = std::exp(-0.5 * z * z) / (test.sigma() * std::sqrt(2.0 * M_PI));
    sum += f * std::polar(1.0, q * x);
  }
  return sum * h;
}

// Midpoint sums at two resolutions combined to cancel the h^2 error term.
inline cplx riemann_halfline(backflow::Side side, double q, const backflow::GaussianTest& test,
                             std::size_t cells = 200000) {
  const cplx coarse = midpoint_halfline(side, q, test, cells);
  const cplx fine = midpoint_halfline(side, q, test, 2 * cells);
  return (4.0 * fine - coarse) / 3.0;
}

// Composite Simpson on [a, b] with an even number of panels of width <= h.
template <typename F>
cplx simpson(F&& f, double a, double b, double h) {
  if (b <= a) return {};
  std::size_t panels = static_cast<std::size_t>(std::ceil((b - a) / h));
  if (panels % 2) ++panels;
  const double step = (b - a) / static_cast<double>(panels);
  cplx sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i)
    sum += (i % 2 ? 4.0 : 2.0) * f(a + step * static_cast<double>(i));
  return sum * step / 3.0;
}

// The smeared current sandwiched between two scattering states, integrated
// directly in position space: K = (i / 4 pi) int f (phi'*_{k'} phi_k - phi*_{k'} phi'_k),
// split at the defect so the jump discontinuity is never crossed.
inline cplx brute_force_kernel(const backflow::DefectSpec& defect, double k_prime, double k,
                               const backflow::GaussianTest& test, double h = 1e-4) {
  using backflow::Side;
  auto density = [&](Side side) {
    const auto a = backflow::branch(defect, k_prime, side);
    const auto b = backflow::branch(defect, k, side);
    return [&test, a, b](double x) {
      const cplx val = std::conj(a.derivative(x)) * b.value(x) - std::conj(a.value(x)) * b.derivative(x);
      return test(x) * val;
    };
  };
  const double lo = test.support_lo(), hi = test.support_hi();
  const cplx left = simpson(density(Side::Left), lo, std::min(hi, 0.0), h);
  const cplx right = simpson(density(Side::Right), std::max(lo, 0.0), hi, h);
  return cplx{0.0, 1.0} / (4.0 * M_PI) * (left + right);
}

// Smallest eigenvalue from a complete dense diagonalisation.
inline double dense_lowest(const backflow::ComplexMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double max_entry_diff(const backflow::ComplexMatrix& a, const backflow::ComplexMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace testing_support
