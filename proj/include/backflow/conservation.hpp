#pragma once

#include <cstdint>
#include <vector>

#include "backflow/core.hpp"

namespace backflow {

// Executable checks of the defect conservation laws. Every time derivative of
// a bulk integral over the two half-lines reduces to boundary terms at x = 0,
// so for a finite superposition of stationary modes each check is algebraic.

struct Mode {
  double k = 1.0;  // right-mover, k > 0
  cplx amplitude{1.0, 0.0};
};

/// psi(x, t) = sum_m a_m exp(-i k_m^2 t / 2) phi_{k_m}(x).
class ModeSuperposition {
 public:
  ModeSuperposition(std::vector<Mode> modes, DefectSpec defect);

  const std::vector<Mode>& modes() const { return modes_; }
  const DefectSpec& defect() const { return defect_; }

 private:
  std::vector<Mode> modes_;
  DefectSpec defect_;
};

enum class Quantity { Energy, Momentum, Probability };

const char* to_string(Quantity q);

/// One-sided field data at the defect.
struct BoundaryValues {
  cplx f, fx, fxx, ft, fxt;
};

BoundaryValues boundary_values(const ModeSuperposition& state, bool left_side, double t);

struct RatePair {
  cplx bulk_flux_rate;    // d/dt of the bulk integrals, as boundary terms at x = 0
  cplx defect_term_rate;  // d/dt of the defect-located correction
  bool has_correction = true;  // false: no correction makes the quantity conserved

  cplx residual() const { return bulk_flux_rate + defect_term_rate; }
};

/// Bulk and defect rates for one quantity at time t. Corrections: jump energy
/// -(alpha/4)|u+v|^2, jump momentum (i/2)(u* v - v* u), jump probability
/// -|u-v|^2/(2 alpha), delta energy lambda |u|^2, delta probability none needed.
/// The delta momentum has no correction; the pair is flagged and its residual
/// is the nonzero flux.
RatePair boundary_rates(const ModeSuperposition& state, Quantity quantity, double t);

struct DeltaMomentumResidual {
  cplx flux_rate;    // P_t from the generic boundary flux
  cplx closed_form;  // lambda (v v*)_x - 2 lambda^2 v v* at 0+
  double deviation() const { return std::abs(flux_rate - closed_form); }
};

/// P_t for a delta defect, which no defect-located term can absorb.
DeltaMomentumResidual delta_momentum_residual(const ModeSuperposition& state, double t);

/// Compares the discretised quadratic form of the fixing-term kernel with the
/// direct value (i/2)(u* v - v* u)|_0 f(0) of the corresponding superposition,
/// over a basket of coefficient vectors (single-node vectors and seeded random
/// ones). Returns the maximum absolute deviation.
double fixing_term_consistency(double alpha, const GaussianTest& test, const GridSpec& grid,
                               std::uint64_t seed = 1);

}  // namespace backflow
