#pragma once

#include "backflow/core.hpp"
#include "backflow/quadrature.hpp"

namespace backflow {

// Kernels K(k', k) = L(k', k) / (2 pi) of the smeared current sandwiched
// between scattering states; k' is the row (conjugated) momentum.

struct KernelPointRequest {
  double k_prime = 1.0;
  double k = 1.0;
  DefectSpec defect;
  GaussianTest test;
};

/// The half-line Fourier integrals an entry depends on, for q = k - k' and
/// s = k + k'. The remaining ones follow by conjugation.
struct HalfLineIntegrals {
  cplx left_diff;   // int_{-inf}^0 f(x) e^{i q x}
  cplx right_diff;  // int_0^inf f(x) e^{i q x}
  cplx left_sum;    // int_{-inf}^0 f(x) e^{i s x}; only the delta kernel reads it
};

HalfLineIntegrals halfline_integrals(double k_prime, double k, const GaussianTest& test,
                                     bool with_sum, const QuadratureOptions& opts = {});

cplx kernel_free(double k_prime, double k, const GaussianTest& test);
cplx kernel_delta(double k_prime, double k, double lambda, const GaussianTest& test);
cplx kernel_jump(double k_prime, double k, double alpha, const GaussianTest& test);

/// Defect-located term that turns the jump kernel into the kernel of the
/// conserved current: -alpha (k + k') f(0) / (2 pi (k - i alpha)(k' + i alpha)).
cplx fixing_term(double k_prime, double k, double alpha, const GaussianTest& test);

/// The term a jump kernel would pick up (as an addend to 2L) if the wavefunction
/// were given the value theta(0) = 1/2 at the defect:
/// 2 alpha (k + k') f(0) / ((k' + i alpha)(k - i alpha)).
cplx theta_half_extra_term(double k_prime, double k, double alpha, const GaussianTest& test);

/// The uv + vu defect-point contributions f(0) (u*_{k'} v_k - v*_{k'} u_k)|_0 / i
/// (as an addend to 2L) built from the one-sided branch limits. Zero for the
/// delta defect, theta_half_extra_term for the jump defect.
cplx defect_point_term(const DefectSpec& defect, double k_prime, double k,
                       const GaussianTest& test);

/// Dispatch on the defect; a conserved jump adds fixing_term.
cplx kernel(const KernelPointRequest& req);

/// Kernel value from precomputed half-line integrals; f0 = f(0).
cplx kernel_from_integrals(const DefectSpec& defect, double k_prime, double k,
                           const HalfLineIntegrals& in, double f0);

}  // namespace backflow
