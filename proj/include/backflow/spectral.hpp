#pragma once

#include <string>

#include "backflow/core.hpp"

namespace backflow {

class AssemblyError : public NumericalError {
 public:
  AssemblyError(const std::string& what, std::size_t row, std::size_t col)
      : NumericalError(what), row_(row), col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_, col_;
};

class SpectralError : public NumericalError {
 public:
  SpectralError(const std::string& what, int iterations, double residual)
      : NumericalError(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct AssemblyOptions {
  unsigned threads = 1;
};

/// Every entry (p_cutoff / n) K(k_i, k_j), both triangles computed from the
/// kernel formula and left unmirrored.
ComplexMatrix assemble_raw(const DefectSpec& defect, const GaussianTest& test,
                           const GridSpec& grid, const AssemblyOptions& opts = {});

/// max_{i,j} |M_ij - conj(M_ji)|.
double hermiticity_report(const ComplexMatrix& m);

/// Checks the diagonal (imaginary parts above 1e-12 are a hard failure), zeroes
/// the diagonal imaginary parts and overwrites the lower triangle with the
/// conjugated upper triangle.
HermitianKernelMatrix mirror_to_hermitian(ComplexMatrix raw, KernelMatrixMeta meta);

HermitianKernelMatrix build_matrix(const DefectSpec& defect, const GaussianTest& test,
                                   const GridSpec& grid, const AssemblyOptions& opts = {});

/// Algebraically smallest eigenvalue and a unit eigenvector.
///
/// The matrix is reduced to a real symmetric tridiagonal matrix by Householder
/// reflections, the eigenvalue is isolated by Sturm-sequence bisection and the
/// eigenvector comes from inverse iteration followed by the back
/// transformation. Throws DomainError for a non-Hermitian input and
/// SpectralError when the residual cannot be brought below 1e-8.
SpectralResult lowest_eigenpair(const ComplexMatrix& m);
SpectralResult lowest_eigenpair(const HermitianKernelMatrix& m);

}  // namespace backflow
