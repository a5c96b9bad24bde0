#include "backflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "backflow/kernels.hpp"
#include "backflow/parallel.hpp"
#include "backflow/quadrature.hpp"

namespace backflow {

namespace {

constexpr double kDiagImagLimit = 1e-12;
constexpr double kHermitianLimit = 1e-10;
constexpr double kResidualTarget = 1e-8;

// Half-line integrals on the midpoint grid only depend on j - i (for k - k')
// and on i + j (for k + k'), so they are tabulated once per matrix.
struct IntegralTable {
  std::vector<cplx> left_diff, right_diff;  // q = m h, m = 0..n-1
  std::vector<cplx> left_sum;               // s = (m + 1) h, m = 0..2n-2

  HalfLineIntegrals at(std::size_t i, std::size_t j) const {
    HalfLineIntegrals out{};
    if (j >= i) {
      out.left_diff = left_diff[j - i];
      out.right_diff = right_diff[j - i];
    } else {
      out.left_diff = std::conj(left_diff[i - j]);
      out.right_diff = std::conj(right_diff[i - j]);
    }
    if (!left_sum.empty()) out.left_sum = left_sum[i + j];
    return out;
  }
};

IntegralTable tabulate(const GaussianTest& test, const GridSpec& grid, bool with_sum,
                       unsigned threads) {
  const std::size_t n = grid.n;
  const double h = grid.step();
  IntegralTable table;
  table.left_diff.resize(n);
  table.right_diff.resize(n);
  if (with_sum) table.left_sum.resize(2 * n - 1);

  const std::size_t jobs = 2 * n + table.left_sum.size();
  parallel_for(jobs, threads, [&](std::size_t job) {
    try {
      if (job < n) {
        table.left_diff[job] = halfline_fourier(Side::Left, static_cast<double>(job) * h, test);
      } else if (job < 2 * n) {
        const std::size_t m = job - n;
        table.right_diff[m] = halfline_fourier(Side::Right, static_cast<double>(m) * h, test);
      } else {
        const std::size_t m = job - 2 * n;
        table.left_sum[m] = halfline_fourier(Side::Left, static_cast<double>(m + 1) * h, test);
      }
    } catch (const QuadratureError& e) {
      // Name one matrix entry that depends on the failed integral.
      std::size_t row = 0, col = 0;
      if (job < 2 * n) {
        col = job < n ? job : job - n;
      } else {
        const std::size_t m = job - 2 * n;
        row = m < n ? 0 : m - (n - 1);
        col = m - row;
      }
      throw AssemblyError("quadrature failed for matrix entry (" + std::to_string(row) + ", " +
                              std::to_string(col) + "): " + e.what(),
                          row, col);
    }
  });
  return table;
}

// ---------------------------------------------------------------------------
// Eigensolver internals. The working copy keeps the lower triangle of the
// Hermitian matrix as split real/imaginary row-major arrays.

struct Workspace {
  std::size_t n;
  std::vector<double> re, im;
  double& r(std::size_t i, std::size_t j) { return re[i * n + j]; }
  double& c(std::size_t i, std::size_t j) { return im[i * n + j]; }
};

struct Tridiagonal {
  std::vector<double> diag, off;  // off[k] couples k and k+1
  std::vector<cplx> tau;          // reflector scalars; vectors stay in the workspace
};

Tridiagonal reduce_to_tridiagonal(Workspace& a) {
  const std::size_t n = a.n;
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.off.assign(n > 0 ? n - 1 : 0, 0.0);
  t.tau.assign(n > 0 ? n - 1 : 0, cplx{});

  std::vector<double> vr(n), vi(n), pr(n), pi(n), wr(n), wi(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t m = n - k - 1;
    const cplx alpha{a.r(k + 1, k), a.c(k + 1, k)};
    double xnorm2 = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      const double xr = a.r(k + 1 + j, k), xi = a.c(k + 1 + j, k);
      xnorm2 += xr * xr + xi * xi;
    }
    t.diag[k] = a.r(k, k);
    if (xnorm2 == 0.0 && alpha.imag() == 0.0) {
      t.off[k] = alpha.real();
      continue;
    }
    const double beta = -std::copysign(std::sqrt(std::norm(alpha) + xnorm2), alpha.real());
    const cplx tau = (beta - alpha) / beta;
    const cplx scale = 1.0 / (alpha - beta);
    t.off[k] = beta;
    t.tau[k] = tau;

    vr[0] = 1.0;
    vi[0] = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      const cplx x{a.r(k + 1 + j, k), a.c(k + 1 + j, k)};
      const cplx v = x * scale;
      vr[j] = v.real();
      vi[j] = v.imag();
      a.r(k + 1 + j, k) = vr[j];
      a.c(k + 1 + j, k) = vi[j];
    }
    a.r(k + 1, k) = 1.0;
    a.c(k + 1, k) = 0.0;

    // p = A22 v from the lower triangle.
    std::fill_n(pr.begin(), m, 0.0);
    std::fill_n(pi.begin(), m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* rr = &a.re[(k + 1 + i) * n + (k + 1)];
      const double* ri = &a.im[(k + 1 + i) * n + (k + 1)];
      const double vir = vr[i], vii = vi[i];
      double sr = 0.0, si = 0.0;
      double* ppr = pr.data();
      double* ppi = pi.data();
      const double* pvr = vr.data();
      const double* pvi = vi.data();
#pragma omp simd reduction(+ : sr, si)
      for (std::size_t j = 0; j < i; ++j) {
        sr += rr[j] * pvr[j] - ri[j] * pvi[j];
        si += rr[j] * pvi[j] + ri[j] * pvr[j];
        // conj(a_ij) v_i
        ppr[j] += rr[j] * vir + ri[j] * vii;
        ppi[j] += rr[j] * vii - ri[j] * vir;
      }
      pr[i] += sr + rr[i] * vir;
      pi[i] += si + rr[i] * vii;
    }
    // p *= tau; alpha2 = -tau/2 (p^H v); w = p + alpha2 v
    cplx phv{};
    for (std::size_t i = 0; i < m; ++i) {
      const cplx p = tau * cplx{pr[i], pi[i]};
      pr[i] = p.real();
      pi[i] = p.imag();
      phv += std::conj(p) * cplx{vr[i], vi[i]};
    }
    const cplx alpha2 = -0.5 * tau * phv;
    for (std::size_t i = 0; i < m; ++i) {
      const cplx w = cplx{pr[i], pi[i]} + alpha2 * cplx{vr[i], vi[i]};
      wr[i] = w.real();
      wi[i] = w.imag();
    }
    // A22 -= v w^H + w v^H on the lower triangle.
    for (std::size_t i = 0; i < m; ++i) {
      double* rr = &a.re[(k + 1 + i) * n + (k + 1)];
      double* ri = &a.im[(k + 1 + i) * n + (k + 1)];
      const double vir = vr[i], vii = vi[i], wir = wr[i], wii = wi[i];
      const double* pvr = vr.data();
      const double* pvi = vi.data();
      const double* pwr = wr.data();
      const double* pwi = wi.data();
#pragma omp simd
      for (std::size_t j = 0; j <= i; ++j) {
        // v_i conj(w_j) + w_i conj(v_j)
        rr[j] -= vir * pwr[j] + vii * pwi[j] + wir * pvr[j] + wii * pvi[j];
        ri[j] -= vii * pwr[j] - vir * pwi[j] + wii * pvr[j] - wir * pvi[j];
      }
    }
  }
  if (n > 0) t.diag[n - 1] = a.r(n - 1, n - 1);
  return t;
}

// Number of eigenvalues of the tridiagonal matrix strictly below x.
std::size_t sturm_count(const Tridiagonal& t, double x, double pivmin) {
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.diag.size(); ++i) {
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double smallest_by_bisection(const Tridiagonal& t, double& scale) {
  const std::size_t n = t.diag.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double max_off2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(t.off[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(t.off[i]) : 0.0;
    lo = std::min(lo, t.diag[i] - left - right);
    hi = std::max(hi, t.diag[i] + left + right);
    if (i + 1 < n) max_off2 = std::max(max_off2, t.off[i] * t.off[i]);
  }
  scale = std::max(std::abs(lo), std::abs(hi));
  const double eps = std::numeric_limits<double>::epsilon();
  const double pivmin = std::max(std::numeric_limits<double>::min(),
                                 std::numeric_limits<double>::min() * max_off2);
  const double width = std::max(hi - lo, eps * scale);
  lo -= 2.0 * eps * scale + pivmin;
  hi = lo + 2.0 * width + 4.0 * eps * scale + pivmin;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
    if (sturm_count(t, mid, pivmin) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Inverse iteration on (T - shift I) with a partially pivoted LU factorisation.
std::vector<double> tridiagonal_eigenvector(const Tridiagonal& t, double shift, double scale,
                                            int iterations) {
  const std::size_t n = t.diag.size();
  std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), mult(n, 0.0);
  std::vector<char> swapped(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = t.diag[i] - shift;
    if (i + 1 < n) u1[i] = t.off[i];
  }
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double sub = t.off[i];
    if (std::abs(d[i]) >= std::abs(sub)) {
      if (d[i] == 0.0) d[i] = tiny;
      mult[i] = sub / d[i];
      d[i + 1] -= mult[i] * u1[i];
      if (i + 2 < n) u1[i + 1] -= mult[i] * u2[i];
    } else {
      const double di = d[i], u1i = u1[i];
      const double next_d = d[i + 1];
      const double next_u1 = i + 2 < n ? u1[i + 1] : 0.0;
      mult[i] = di / sub;
      swapped[i] = 1;
      d[i] = sub;
      u1[i] = next_d;
      u2[i] = next_u1;
      d[i + 1] = u1i - mult[i] * next_d;
      if (i + 2 < n) u1[i + 1] = -mult[i] * next_u1;
    }
  }
  for (auto& x : d)
    if (std::abs(x) < tiny) x = std::copysign(tiny, x == 0.0 ? 1.0 : x);

  std::vector<double> y(n);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (auto& v : y) v = dist(rng);

  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(y[i], y[i + 1]);
      y[i + 1] -= mult[i] * y[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      if (ii + 1 < n) s -= u1[ii] * y[ii + 1];
      if (ii + 2 < n) s -= u2[ii] * y[ii + 2];
      y[ii] = s / d[ii];
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& v : y) v /= norm;
  }
  return y;
}

std::vector<cplx> back_transform(const Workspace& a, const Tridiagonal& t,
                                 const std::vector<double>& z) {
  const std::size_t n = a.n;
  std::vector<cplx> y(z.begin(), z.end());
  for (std::size_t k = n >= 2 ? n - 1 : 0; k-- > 0;) {
    const cplx tau = t.tau[k];
    if (tau == cplx{}) continue;
    cplx s{};
    for (std::size_t i = k + 1; i < n; ++i)
      s += cplx{a.re[i * n + k], -a.im[i * n + k]} * y[i];
    const cplx f = tau * s;
    for (std::size_t i = k + 1; i < n; ++i) y[i] -= cplx{a.re[i * n + k], a.im[i * n + k]} * f;
  }
  return y;
}

double residual_norm(const ComplexMatrix& m, const std::vector<cplx>& v, double beta) {
  const std::size_t n = m.dim();
  double r2 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc{};
    const auto row = m.row(i);
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
    acc -= beta * v[i];
    r2 += std::norm(acc);
    v2 += std::norm(v[i]);
  }
  return std::sqrt(r2 / v2);
}

void require_hermitian(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw DomainError("empty matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(m(i, i).real()) || std::abs(m(i, i).imag()) > kDiagImagLimit)
      throw DomainError("diagonal entry " + std::to_string(i) + " is not real");
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(std::abs(m(i, j) - std::conj(m(j, i))) <= kHermitianLimit))
        throw DomainError("matrix is not Hermitian at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
  }
}

}  // namespace

ComplexMatrix assemble_raw(const DefectSpec& defect, const GaussianTest& test,
                           const GridSpec& grid, const AssemblyOptions& opts) {
  grid.validate();
  const std::size_t n = grid.n;
  const double h = grid.step();
  const std::vector<double> k = make_grid(grid);
  const unsigned threads = std::max(1u, opts.threads);
  const IntegralTable table = tabulate(test, grid, defect.kind() == DefectKind::Delta, threads);
  const double f0 = test(0.0);

  ComplexMatrix m(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < n; ++j)
      row[j] = h * kernel_from_integrals(defect, k[i], k[j], table.at(i, j), f0);
  });
  return m;
}

double hermiticity_report(const ComplexMatrix& m) {
  double worst = 0.0;
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

HermitianKernelMatrix mirror_to_hermitian(ComplexMatrix raw, KernelMatrixMeta meta) {
  const std::size_t n = raw.dim();
  meta.raw_hermiticity_deviation = hermiticity_report(raw);
  for (std::size_t i = 0; i < n; ++i) {
    const double im = raw(i, i).imag();
    if (!(std::abs(im) <= kDiagImagLimit))
      throw AssemblyError("diagonal entry (" + std::to_string(i) + ", " + std::to_string(i) +
                              ") has imaginary part " + std::to_string(im),
                          i, i);
    raw(i, i) = cplx{raw(i, i).real(), 0.0};
    for (std::size_t j = i + 1; j < n; ++j) raw(j, i) = std::conj(raw(i, j));
  }
  return HermitianKernelMatrix{std::move(raw), std::move(meta)};
}

HermitianKernelMatrix build_matrix(const DefectSpec& defect, const GaussianTest& test,
                                   const GridSpec& grid, const AssemblyOptions& opts) {
  return mirror_to_hermitian(assemble_raw(defect, test, grid, opts),
                             KernelMatrixMeta{defect, test, grid, 0.0});
}

SpectralResult lowest_eigenpair(const ComplexMatrix& m) {
  require_hermitian(m);
  const std::size_t n = m.dim();

  Workspace a{n, std::vector<double>(n * n), std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      a.r(i, j) = m(i, j).real();
      a.c(i, j) = i == j ? 0.0 : m(i, j).imag();
    }
  const Tridiagonal t = reduce_to_tridiagonal(a);
  double scale = 0.0;
  const double beta = smallest_by_bisection(t, scale);

  SpectralResult out;
  out.beta = beta;
  int iterations = 0;
  for (int sweeps : {3, 6, 12}) {
    iterations = sweeps;
    std::vector<cplx> y = back_transform(a, t, tridiagonal_eigenvector(t, beta, scale, sweeps));
    double norm = 0.0;
    for (const auto& v : y) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (auto& v : y) v /= norm;
    out.eigenvector = std::move(y);
    out.residual_norm = residual_norm(m, out.eigenvector, beta);
    if (out.residual_norm <= kResidualTarget) return out;
  }
  throw SpectralError("inverse iteration residual " + std::to_string(out.residual_norm) +
                          " above 1e-8 after " + std::to_string(iterations) + " sweeps",
                      iterations, out.residual_norm);
}

SpectralResult lowest_eigenpair(const HermitianKernelMatrix& m) {
  return lowest_eigenpair(m.entries);
}

}  // namespace backflow
