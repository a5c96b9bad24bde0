#include "backflow/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "backflow/kernels.hpp"
#include "backflow/scattering.hpp"

namespace backflow {

namespace {

constexpr cplx I{0.0, 1.0};

// d/dt |w|^2
double rate_of_norm(const cplx& w, const cplx& wt) { return 2.0 * std::real(std::conj(w) * wt); }

}  // namespace

ModeSuperposition::ModeSuperposition(std::vector<Mode> modes, DefectSpec defect)
    : modes_(std::move(modes)), defect_(defect) {
  if (modes_.empty()) throw ConfigError("a superposition needs at least one mode");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (!(modes_[i].k > 0.0) || !std::isfinite(modes_[i].k))
      throw ConfigError("mode momenta must be positive (right-movers only)");
    for (std::size_t j = 0; j < i; ++j)
      if (modes_[j].k == modes_[i].k) throw ConfigError("mode momenta must be distinct");
  }
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::Energy: return "energy";
    case Quantity::Momentum: return "momentum";
    case Quantity::Probability: return "probability";
  }
  return "unknown";
}

BoundaryValues boundary_values(const ModeSuperposition& state, bool left_side, double t) {
  BoundaryValues b{};
  for (const Mode& mode : state.modes()) {
    const ScatteringBranch br =
        branch(state.defect(), mode.k, left_side ? Side::Left : Side::Right);
    const double omega = 0.5 * mode.k * mode.k;
    const cplx c = mode.amplitude * std::polar(1.0, -omega * t);
    const cplx value = c * br.value(0.0);
    const cplx slope = c * br.derivative(0.0);
    b.f += value;
    b.fx += slope;
    b.fxx += -mode.k * mode.k * value;
    b.ft += -I * omega * value;
    b.fxt += -I * omega * slope;
  }
  return b;
}

namespace {

cplx energy_flux(const BoundaryValues& b) {
  return 0.5 * (std::conj(b.ft) * b.fx + std::conj(b.fx) * b.ft);
}

cplx momentum_flux(const BoundaryValues& b) {
  return 0.25 * (-2.0 * std::conj(b.fx) * b.fx + std::conj(b.f) * b.fxx + b.f * std::conj(b.fxx));
}

cplx probability_flux(const BoundaryValues& b) {
  return 0.5 * (-I * std::conj(b.fx) * b.f + I * std::conj(b.f) * b.fx);
}

}  // namespace

RatePair boundary_rates(const ModeSuperposition& state, Quantity quantity, double t) {
  const BoundaryValues u = boundary_values(state, true, t);
  const BoundaryValues v = boundary_values(state, false, t);
  const DefectSpec& defect = state.defect();
  const double s = defect.strength();

  RatePair out{};
  switch (quantity) {
    case Quantity::Energy:
      out.bulk_flux_rate = energy_flux(u) - energy_flux(v);
      break;
    case Quantity::Momentum:
      out.bulk_flux_rate = momentum_flux(u) - momentum_flux(v);
      break;
    case Quantity::Probability:
      out.bulk_flux_rate = probability_flux(u) - probability_flux(v);
      break;
  }

  switch (defect.kind()) {
    case DefectKind::Free:
      break;
    case DefectKind::Delta:
      if (quantity == Quantity::Energy) out.defect_term_rate = s * rate_of_norm(u.f, u.ft);
      if (quantity == Quantity::Momentum) out.has_correction = false;
      break;
    case DefectKind::Jump: {
      const cplx sum = u.f + v.f, sum_t = u.ft + v.ft;
      const cplx diff = u.f - v.f, diff_t = u.ft - v.ft;
      switch (quantity) {
        case Quantity::Energy:
          out.defect_term_rate = -0.25 * s * rate_of_norm(sum, sum_t);
          break;
        case Quantity::Momentum:
          out.defect_term_rate = 0.5 * I *
                                 (std::conj(u.ft) * v.f + std::conj(u.f) * v.ft -
                                  std::conj(v.ft) * u.f - std::conj(v.f) * u.ft);
          break;
        case Quantity::Probability:
          out.defect_term_rate = -rate_of_norm(diff, diff_t) / (2.0 * s);
          break;
      }
      break;
    }
  }
  return out;
}

DeltaMomentumResidual delta_momentum_residual(const ModeSuperposition& state, double t) {
  if (state.defect().kind() != DefectKind::Delta)
    throw UnsupportedError("the momentum residual is defined for the delta defect");
  const double lambda = state.defect().strength();
  const BoundaryValues u = boundary_values(state, true, t);
  const BoundaryValues v = boundary_values(state, false, t);
  DeltaMomentumResidual out{};
  out.flux_rate = momentum_flux(u) - momentum_flux(v);
  const double density_slope = 2.0 * std::real(std::conj(v.f) * v.fx);
  out.closed_form = lambda * density_slope - 2.0 * lambda * lambda * std::norm(v.f);
  return out;
}

double fixing_term_consistency(double alpha, const GaussianTest& test, const GridSpec& grid,
                               std::uint64_t seed) {
  const DefectSpec defect = DefectSpec::jump(alpha, true);
  const std::vector<double> k = make_grid(grid);
  const std::size_t n = k.size();
  const double h = grid.step();
  const double f0 = test(0.0);

  std::vector<std::vector<cplx>> basket;
  for (std::size_t node : {std::size_t{0}, n / 2, n - 1}) {
    std::vector<cplx> g(n);
    g[node] = 1.0;
    basket.push_back(std::move(g));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int r = 0; r < 4; ++r) {
    std::vector<cplx> g(n);
    for (auto& x : g) x = {normal(rng), normal(rng)};
    basket.push_back(std::move(g));
  }

  std::vector<cplx> u_at_defect(n), v_at_defect(n);
  for (std::size_t j = 0; j < n; ++j) {
    u_at_defect[j] = branch(defect, k[j], Side::Left).value(0.0);
    v_at_defect[j] = branch(defect, k[j], Side::Right).value(0.0);
  }

  double worst = 0.0;
  for (const auto& g : basket) {
    cplx form{};
    for (std::size_t i = 0; i < n; ++i) {
      if (g[i] == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (g[j] == cplx{}) continue;
        form += std::conj(g[i]) * g[j] * h * fixing_term(k[i], k[j], alpha, test);
      }
    }
    // Fields at the defect of the packet with step-function coefficients g.
    cplx u{}, v{};
    const double weight = std::sqrt(h) / std::sqrt(2.0 * kPi);
    for (std::size_t j = 0; j < n; ++j) {
      u += weight * g[j] * u_at_defect[j];
      v += weight * g[j] * v_at_defect[j];
    }
    const cplx direct = 0.5 * I * (std::conj(u) * v - std::conj(v) * u) * f0;
    worst = std::max(worst, std::abs(form - direct));
  }
  return worst;
}

}  // namespace backflow
