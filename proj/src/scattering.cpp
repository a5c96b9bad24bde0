#include "backflow/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace backflow {

namespace {

constexpr cplx I{0.0, 1.0};

void require_positive_momentum(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw DomainError("scattering momentum must be positive, got " + std::to_string(k));
}

// |lhs - rhs| relative to the size of the terms being compared.
double mismatch(cplx lhs, cplx rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

ScatteringCoefficients coefficients(const DefectSpec& defect, double k) {
  require_positive_momentum(k);
  const double s = defect.strength();
  switch (defect.kind()) {
    case DefectKind::Free:
      return {cplx{1.0, 0.0}, cplx{0.0, 0.0}, k};
    case DefectKind::Delta: {
      const cplx denom = I * k - s;
      return {I * k / denom, s / denom, k};
    }
    case DefectKind::Jump:
      return {cplx{k, s} / cplx{k, -s}, cplx{0.0, 0.0}, k};
  }
  throw UnsupportedError("unknown defect kind");
}

cplx ScatteringBranch::value(double x) const {
  const cplx wave = std::polar(1.0, k * x);
  return incident * wave + counter * std::conj(wave);
}

cplx ScatteringBranch::derivative(double x) const {
  const cplx wave = std::polar(1.0, k * x);
  return I * k * (incident * wave - counter * std::conj(wave));
}

ScatteringBranch branch(const DefectSpec& defect, double k, Side side) {
  const ScatteringCoefficients c = coefficients(defect, k);
  if (side == Side::Left) return {k, cplx{1.0, 0.0}, c.r};
  return {k, c.t, cplx{0.0, 0.0}};
}

cplx scattering_state(const DefectSpec& defect, double k, double x) {
  if (x == 0.0 && defect.kind() == DefectKind::Jump)
    throw DomainError("jump-defect wavefunction has no value at the defect (x = 0)");
  return branch(defect, k, x < 0.0 ? Side::Left : Side::Right).value(x);
}

double check_sewing(const DefectSpec& defect, double k) {
  const ScatteringBranch left = branch(defect, k, Side::Left);
  const ScatteringBranch right = branch(defect, k, Side::Right);
  const cplx u = left.value(0.0), ux = left.derivative(0.0);
  const cplx v = right.value(0.0), vx = right.derivative(0.0);
  const double s = defect.strength();
  switch (defect.kind()) {
    case DefectKind::Free:
      return std::max(mismatch(u, v), mismatch(ux, vx));
    case DefectKind::Delta:
      return std::max(mismatch(u, v), mismatch(vx - ux, 2.0 * s * u));
    case DefectKind::Jump: {
      const double omega = 0.5 * k * k;
      const cplx jump_t = -I * omega * (u - v);
      return std::max(mismatch(ux - vx, s * (u + v)), mismatch(vx + ux, -(2.0 * I / s) * jump_t));
    }
  }
  return 0.0;
}

cplx DefectBoundState::value(double alpha, double x, double t) const {
  const bool on_side = side == Side::Right ? x > 0.0 : x < 0.0;
  if (!on_side) return cplx{0.0, 0.0};
  const double spatial = side == Side::Right ? -alpha * x : alpha * x;
  return std::exp(cplx{spatial, energy_phase_rate * t});
}

std::vector<DefectBoundState> bound_state_candidates(const DefectSpec& defect) {
  if (defect.kind() != DefectKind::Jump)
    throw UnsupportedError("bound states are enumerated for the jump defect only");
  const double alpha = defect.strength();
  const double rate = 0.5 * alpha * alpha;
  // v = exp(i a^2 t/2 - a x) on x > 0 (k = i a) and u = exp(i a^2 t/2 + a x) on
  // x < 0 (k = -i a). Both decay away from the defect only when a > 0.
  const bool normalisable = alpha > 0.0;
  return {
      DefectBoundState{std::abs(alpha), Side::Right, rate, normalisable},
      DefectBoundState{std::abs(alpha), Side::Left, rate, normalisable},
  };
}

std::vector<DefectBoundState> bound_states(const DefectSpec& defect) {
  std::vector<DefectBoundState> out;
  for (const auto& s : bound_state_candidates(defect))
    if (s.square_integrable) out.push_back(s);
  return out;
}

double check_bound_state_sewing(const DefectSpec& defect, const DefectBoundState& state) {
  if (defect.kind() != DefectKind::Jump)
    throw UnsupportedError("bound-state sewing applies to the jump defect only");
  const double alpha = defect.strength();
  // Unit amplitude at x = 0, t = 0; d/dt acts as +i alpha^2/2.
  const cplx dt = I * state.energy_phase_rate;
  cplx u{}, ux{}, v{}, vx{};
  if (state.side == Side::Right) {
    v = 1.0;
    vx = -alpha;
  } else {
    u = 1.0;
    ux = alpha;
  }
  return std::max(mismatch(ux - vx, alpha * (u + v)),
                  mismatch(vx + ux, -(2.0 * I / alpha) * dt * (u - v)));
}

std::optional<DeltaBoundState> delta_bound_state(const DefectSpec& defect) {
  if (defect.kind() != DefectKind::Delta || defect.strength() >= 0.0) return std::nullopt;
  const double lambda = defect.strength();
  return DeltaBoundState{-lambda, -0.5 * lambda * lambda};
}

}  // namespace backflow
