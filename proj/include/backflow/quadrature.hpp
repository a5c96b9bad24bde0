#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "backflow/core.hpp"

namespace backflow {

enum class Side { Left, Right };  // (-inf, 0] or [0, inf)

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericalError(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

struct HalfLineIntegralRequest {
  Side side = Side::Left;
  double q = 0.0;
  GaussianTest test;
};

struct QuadratureOptions {
  double abs_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

/// Gauss-Kronrod 21-point rule on [-1, 1] with its embedded 10-point Gauss rule.
struct GaussKronrod21 {
  std::array<double, 21> nodes;
  std::array<double, 21> kronrod_weights;
  std::array<double, 21> gauss_weights;  // zero where the node is Kronrod-only

  static const GaussKronrod21& instance();
};

struct QuadratureResult {
  cplx value;
  double error_estimate;
  std::size_t intervals;
};

/// Globally adaptive Gauss-Kronrod integration of a complex integrand on
/// [a, b]. The interval is first cut into `initial_panels` equal pieces; the
/// panel with the largest |K21 - G10| is bisected until the summed estimate
/// is below opts.abs_tol. Exceeding opts.max_intervals throws.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, std::size_t initial_panels,
                                    const QuadratureOptions& opts = {}) {
  const auto& rule = GaussKronrod21::instance();
  struct Panel {
    double a, b;
    cplx value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    cplx kr{}, ga{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const cplx y = f(mid + half * rule.nodes[i]);
      kr += rule.kronrod_weights[i] * y;
      ga += rule.gauss_weights[i] * y;
    }
    return Panel{lo, hi, kr * half, std::abs(kr - ga) * std::abs(half)};
  };

  initial_panels = std::max<std::size_t>(initial_panels, 1);
  if (initial_panels > opts.max_intervals)
    throw QuadratureError("oscillatory integrand needs " + std::to_string(initial_panels) +
                              " panels, above the cap of " +
                              std::to_string(opts.max_intervals),
                          std::numeric_limits<double>::infinity());

  std::priority_queue<Panel> heap;
  cplx total{};
  double err = 0.0;
  const double width = (b - a) / static_cast<double>(initial_panels);
  for (std::size_t p = 0; p < initial_panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double hi = (p + 1 == initial_panels) ? b : lo + width;
    Panel panel = eval(lo, hi);
    total += panel.value;
    err += panel.err;
    heap.push(panel);
  }
  while (err > opts.abs_tol) {
    if (heap.size() >= opts.max_intervals)
      throw QuadratureError("adaptive quadrature did not converge: error estimate " +
                                std::to_string(err) + " after " +
                                std::to_string(heap.size()) + " intervals",
                            err);
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw QuadratureError("adaptive quadrature hit interval resolution limit", err);
    Panel left = eval(worst.a, mid), right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  cplx sum{};
  double esum = 0.0;
  const std::size_t count = heap.size();
  std::vector<Panel> panels;
  panels.reserve(count);
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    sum += p.value;
    esum += p.err;
  }
  return {sum, esum, count};
}

/// f(x) for the truncated Gaussian.
double gaussian_eval(const GaussianTest& test, double x);

/// Integral of f(x) exp(i q x) over the requested half-line.
cplx halfline_fourier(const HalfLineIntegralRequest& req, const QuadratureOptions& opts = {});

inline cplx halfline_fourier(Side side, double q, const GaussianTest& test,
                             const QuadratureOptions& opts = {}) {
  return halfline_fourier(HalfLineIntegralRequest{side, q, test}, opts);
}

/// Closed-form Fourier transform of the untruncated Gaussian over the whole line.
cplx gaussian_fourier_full_line(const GaussianTest& test, double q);

}  // namespace backflow
