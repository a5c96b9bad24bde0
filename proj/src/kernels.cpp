#include "backflow/kernels.hpp"

#include "backflow/scattering.hpp"

namespace backflow {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kInv2Pi = 1.0 / (2.0 * kPi);

void require_momenta(double k_prime, double k) {
  if (!(k_prime > 0.0) || !(k > 0.0))
    throw DomainError("kernel momenta must be positive");
}

// 2L(k', k) for each family, from the half-line integrals.
cplx twice_l_free(double kp, double k, const HalfLineIntegrals& in) {
  return (k + kp) * (in.left_diff + in.right_diff);
}

cplx twice_l_delta(double kp, double k, double lambda, const HalfLineIntegrals& in) {
  const cplx out_k = I * k - lambda;        // ik - lambda
  const cplx in_kp = I * kp + lambda;       // ik' + lambda
  const cplx both = in_kp * out_k;
  const cplx left_minus_diff = std::conj(in.left_diff);  // e^{-ix(k-k')}
  const cplx left_minus_sum = std::conj(in.left_sum);    // e^{-ix(k+k')}
  cplx acc = (k + kp) * in.left_diff;
  acc += lambda * (kp - k) / out_k * left_minus_sum;
  acc -= lambda * (k - kp) / in_kp * in.left_sum;
  acc += lambda * lambda * (k + kp) / both * left_minus_diff;
  acc -= k * kp * (k + kp) / both * in.right_diff;
  return acc;
}

cplx twice_l_jump(double kp, double k, double alpha, const HalfLineIntegrals& in) {
  const cplx num{k * kp + alpha * alpha, alpha * (kp - k)};
  const cplx den = cplx{kp, alpha} * cplx{k, -alpha};
  return (k + kp) * (in.left_diff + num / den * in.right_diff);
}

cplx fixing_from_f0(double kp, double k, double alpha, double f0) {
  if (f0 == 0.0) return cplx{0.0, 0.0};
  const cplx den = cplx{k, -alpha} * cplx{kp, alpha};
  return -kInv2Pi * alpha * (k + kp) * f0 / den;
}

}  // namespace

HalfLineIntegrals halfline_integrals(double k_prime, double k, const GaussianTest& test,
                                     bool with_sum, const QuadratureOptions& opts) {
  const double q = k - k_prime;
  HalfLineIntegrals out{};
  out.left_diff = halfline_fourier(Side::Left, q, test, opts);
  out.right_diff = halfline_fourier(Side::Right, q, test, opts);
  if (with_sum) out.left_sum = halfline_fourier(Side::Left, k + k_prime, test, opts);
  return out;
}

cplx kernel_from_integrals(const DefectSpec& defect, double k_prime, double k,
                           const HalfLineIntegrals& in, double f0) {
  const double s = defect.strength();
  switch (defect.kind()) {
    case DefectKind::Free:
      return 0.5 * kInv2Pi * twice_l_free(k_prime, k, in);
    case DefectKind::Delta:
      return 0.5 * kInv2Pi * twice_l_delta(k_prime, k, s, in);
    case DefectKind::Jump: {
      cplx value = 0.5 * kInv2Pi * twice_l_jump(k_prime, k, s, in);
      if (defect.conserved()) value += fixing_from_f0(k_prime, k, s, f0);
      return value;
    }
  }
  throw UnsupportedError("unknown defect kind");
}

cplx kernel_free(double k_prime, double k, const GaussianTest& test) {
  require_momenta(k_prime, k);
  return kernel_from_integrals(DefectSpec::free(), k_prime, k,
                               halfline_integrals(k_prime, k, test, false), 0.0);
}

cplx kernel_delta(double k_prime, double k, double lambda, const GaussianTest& test) {
  require_momenta(k_prime, k);
  const DefectSpec defect = DefectSpec::delta(lambda);
  return kernel_from_integrals(defect, k_prime, k,
                               halfline_integrals(k_prime, k, test, true), 0.0);
}

cplx kernel_jump(double k_prime, double k, double alpha, const GaussianTest& test) {
  require_momenta(k_prime, k);
  const DefectSpec defect = DefectSpec::jump(alpha, false);
  return kernel_from_integrals(defect, k_prime, k,
                               halfline_integrals(k_prime, k, test, false), 0.0);
}

cplx fixing_term(double k_prime, double k, double alpha, const GaussianTest& test) {
  require_momenta(k_prime, k);
  if (alpha == 0.0) throw ConfigError("jump strength must be nonzero");
  return fixing_from_f0(k_prime, k, alpha, test(0.0));
}

cplx theta_half_extra_term(double k_prime, double k, double alpha, const GaussianTest& test) {
  require_momenta(k_prime, k);
  if (alpha == 0.0) throw ConfigError("jump strength must be nonzero");
  const cplx den = cplx{k_prime, alpha} * cplx{k, -alpha};
  return 2.0 * alpha * (k + k_prime) * test(0.0) / den;
}

cplx defect_point_term(const DefectSpec& defect, double k_prime, double k,
                       const GaussianTest& test) {
  require_momenta(k_prime, k);
  const cplx u_kp = branch(defect, k_prime, Side::Left).value(0.0);
  const cplx v_kp = branch(defect, k_prime, Side::Right).value(0.0);
  const cplx u_k = branch(defect, k, Side::Left).value(0.0);
  const cplx v_k = branch(defect, k, Side::Right).value(0.0);
  const cplx in_2il = test(0.0) * (std::conj(u_kp) * v_k - std::conj(v_kp) * u_k);
  return in_2il / I;
}

cplx kernel(const KernelPointRequest& req) {
  require_momenta(req.k_prime, req.k);
  const bool with_sum = req.defect.kind() == DefectKind::Delta;
  const HalfLineIntegrals in = halfline_integrals(req.k_prime, req.k, req.test, with_sum);
  return kernel_from_integrals(req.defect, req.k_prime, req.k, in, req.test(0.0));
}

}  // namespace backflow
