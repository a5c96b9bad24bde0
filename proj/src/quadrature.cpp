#include "backflow/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace backflow {

const GaussKronrod21& GaussKronrod21::instance() {
  static const GaussKronrod21 rule = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& kx = gauss_kronrod<double, 21>::abscissa();
    const auto& kw = gauss_kronrod<double, 21>::weights();
    const auto& gx = gauss<double, 10>::abscissa();
    const auto& gw = gauss<double, 10>::weights();

    GaussKronrod21 r{};
    std::size_t slot = 0;
    auto gauss_weight_for = [&](double x) {
      for (std::size_t j = 0; j < gx.size(); ++j)
        if (std::abs(gx[j] - std::abs(x)) < 1e-14) return gw[j];
      return 0.0;
    };
    for (std::size_t i = 0; i < kx.size(); ++i) {
      const double x = kx[i];
      r.nodes[slot] = x;
      r.kronrod_weights[slot] = kw[i];
      r.gauss_weights[slot] = gauss_weight_for(x);
      ++slot;
      if (x != 0.0) {
        r.nodes[slot] = -x;
        r.kronrod_weights[slot] = kw[i];
        r.gauss_weights[slot] = gauss_weight_for(x);
        ++slot;
      }
    }
    if (slot != 21) throw std::logic_error("unexpected Gauss-Kronrod node layout");
    return r;
  }();
  return rule;
}

double gaussian_eval(const GaussianTest& test, double x) { return test(x); }

cplx halfline_fourier(const HalfLineIntegralRequest& req, const QuadratureOptions& opts) {
  const GaussianTest& test = req.test;
  if (!std::isfinite(req.q)) throw ConfigError("oscillation frequency must be finite");

  double a = test.support_lo(), b = test.support_hi();
  if (req.side == Side::Left)
    b = std::min(b, 0.0);
  else
    a = std::max(a, 0.0);
  if (!(a < b)) return cplx{0.0, 0.0};

  const double length = b - a;
  const double sigma = test.sigma();
  const double x0 = test.x0();
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
  const double q = req.q;

  // Panels of about three radians of phase and two widths of the Gaussian
  // keep every K21 panel well inside its exactness range.
  const double by_phase = std::abs(q) * length / 3.0;
  const double by_width = length / (2.0 * sigma);
  const double wanted = std::ceil(std::max({by_phase, by_width, 1.0}));
  const std::size_t panels = wanted > 1e9 ? static_cast<std::size_t>(1e9)
                                          : static_cast<std::size_t>(wanted);

  auto integrand = [&](double x) {
    const double z = (x - x0) / sigma;
    const double g = norm * std::exp(-0.5 * z * z);
    return cplx{g * std::cos(q * x), g * std::sin(q * x)};
  };
  return integrate_adaptive(integrand, a, b, panels, opts).value;
}

cplx gaussian_fourier_full_line(const GaussianTest& test, double q) {
  const double s = test.sigma();
  return std::exp(cplx{-0.5 * q * q * s * s, q * test.x0()});
}

}  // namespace backflow
