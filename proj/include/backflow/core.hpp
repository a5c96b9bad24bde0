#pragma once

// Domain types shared by every part of the solver. Units: hbar = m = 1.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace backflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. The CLI maps these onto exit codes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DefectKind { Free, Delta, Jump };

std::string to_string(DefectKind kind);
DefectKind parse_defect_kind(const std::string& name);

/// Which point interaction sits at x = 0.
///
/// Delta carries the potential strength lambda (V = lambda * delta(x)); Jump
/// carries the jump-defect parameter alpha and whether the defect-located
/// momentum correction is part of the measured current. A zero strength is
/// rejected: the free particle must be requested as Free.
class DefectSpec {
 public:
  DefectSpec() = default;  // Free

  static DefectSpec free() { return DefectSpec{}; }
  static DefectSpec delta(double lambda);
  static DefectSpec jump(double alpha, bool conserved = false);
  static DefectSpec make(DefectKind kind, double strength, bool conserved);

  DefectKind kind() const { return kind_; }
  double strength() const { return strength_; }
  bool conserved() const { return conserved_; }

  bool operator==(const DefectSpec&) const = default;

 private:
  DefectSpec(DefectKind kind, double strength, bool conserved)
      : kind_(kind), strength_(strength), conserved_(conserved) {}

  DefectKind kind_ = DefectKind::Free;
  double strength_ = 0.0;
  bool conserved_ = false;
};

/// Normalised Gaussian averaging function centred at x0, truncated to
/// [x0 - c*sigma, x0 + c*sigma] (not renormalised after truncation).
class GaussianTest {
 public:
  explicit GaussianTest(double x0 = 0.0, double sigma = 0.1,
                        double support_factor = 8.0);

  double x0() const { return x0_; }
  double sigma() const { return sigma_; }
  double support_factor() const { return support_factor_; }
  double support_lo() const { return x0_ - support_factor_ * sigma_; }
  double support_hi() const { return x0_ + support_factor_ * sigma_; }

  /// f(x); zero outside the truncated support.
  double operator()(double x) const;

  bool operator==(const GaussianTest&) const = default;

 private:
  double x0_;
  double sigma_;
  double support_factor_;
};

/// Midpoint discretisation of [0, p_cutoff] into n cells.
struct GridSpec {
  std::size_t n = 2000;
  double p_cutoff = 200.0;

  double step() const { return p_cutoff / static_cast<double>(n); }
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Nodes k_i = (i + 1/2) * p_cutoff / n.
std::vector<double> make_grid(const GridSpec& spec);

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::initializer_list<cplx> row_major);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  std::span<cplx> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const cplx> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const cplx> data() const { return data_; }

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

struct KernelMatrixMeta {
  DefectSpec defect;
  GaussianTest test;
  GridSpec grid;
  // max |M_ij - conj(M_ji)| before the lower triangle was overwritten
  double raw_hermiticity_deviation = 0.0;
};

/// The discretised current operator M_ij = (p_cutoff / n) K(k_i, k_j).
struct HermitianKernelMatrix {
  ComplexMatrix entries;
  KernelMatrixMeta meta;

  std::size_t dim() const { return entries.dim(); }
};

struct SpectralResult {
  double beta = 0.0;
  std::vector<cplx> eigenvector;  // unit norm, values at the grid nodes
  double residual_norm = 0.0;     // ||M v - beta v|| / ||v||
};

}  // namespace backflow
