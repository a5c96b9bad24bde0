#pragma once

#include <optional>
#include <vector>

#include "backflow/core.hpp"
#include "backflow/quadrature.hpp"

namespace backflow {

struct ScatteringCoefficients {
  cplx t;  // transmission T(k)
  cplx r;  // reflection R(k)
  double k = 0.0;
};

/// Closed-form T(k), R(k) for an incoming right-mover of momentum k > 0.
ScatteringCoefficients coefficients(const DefectSpec& defect, double k);

/// One side of a stationary scattering state: A e^{ikx} + B e^{-ikx}.
struct ScatteringBranch {
  double k = 0.0;
  cplx incident;  // A
  cplx counter;   // B

  cplx value(double x) const;
  cplx derivative(double x) const;
};

/// Left (u_k) or right (v_k) branch of the scattering state. Evaluating a
/// branch at x = 0 gives the one-sided limit at the defect.
ScatteringBranch branch(const DefectSpec& defect, double k, Side side);

/// phi_k(x): u_k for x < 0, v_k for x > 0. At x = 0 the delta state returns
/// its continuous value; the jump state has no value there and throws.
cplx scattering_state(const DefectSpec& defect, double k, double x);

/// Max residual of the defect's sewing conditions on the stationary state at
/// x = 0, with d/dt acting as -i k^2/2. Each condition lhs = rhs contributes
/// |lhs - rhs| / max(1, |lhs|, |rhs|).
double check_sewing(const DefectSpec& defect, double k);

struct DefectBoundState {
  double decay_rate = 0.0;         // |alpha|
  Side side = Side::Right;         // half-line carrying the nonzero branch
  double energy_phase_rate = 0.0;  // alpha^2/2, the state goes as exp(+i rate t)
  bool square_integrable = false;

  /// Branch value at (x, t) with unit amplitude; zero on the other side.
  cplx value(double alpha, double x, double t) const;
};

/// Both jump-defect bound-state candidates (k = i alpha and k = -i alpha),
/// square-integrable or not.
std::vector<DefectBoundState> bound_state_candidates(const DefectSpec& defect);

/// Square-integrable jump-defect bound states. Throws UnsupportedError for
/// anything but a jump defect.
std::vector<DefectBoundState> bound_states(const DefectSpec& defect);

/// Sewing residual of a jump bound state (the other branch is identically zero).
double check_bound_state_sewing(const DefectSpec& defect, const DefectBoundState& state);

/// Attractive delta bound state sqrt(-lambda) exp(lambda |x|), energy -lambda^2/2.
/// Listed for completeness; it does not enter the current kernel.
struct DeltaBoundState {
  double kappa = 0.0;  // decay rate -lambda
  double energy = 0.0;
};
std::optional<DeltaBoundState> delta_bound_state(const DefectSpec& defect);

}  // namespace backflow
