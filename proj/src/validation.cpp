#include "backflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "backflow/conservation.hpp"
#include "backflow/core.hpp"
#include "backflow/kernels.hpp"
#include "backflow/quadrature.hpp"
#include "backflow/scan.hpp"
#include "backflow/scattering.hpp"
#include "backflow/spectral.hpp"

namespace backflow {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"quadrature", "scattering",   "kernels",
                                                 "spectral",   "conservation", "scan"};
  return names;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Passes when value <= limit; the detail records both.
Check bound(std::string name, double value, double limit) {
  return {std::move(name), value <= limit, sci(value) + " <= " + sci(limit)};
}

struct Context {
  std::mt19937_64 rng;
  unsigned threads;
  bool hermiticity_fault;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double nonzero(double lo, double hi) {
    const double mag = uniform(lo, hi);
    return uniform(0.0, 1.0) < 0.5 ? -mag : mag;
  }
};

std::vector<Check> quadrature_suite(Context& ctx) {
  std::vector<Check> out;
  const auto& rule = GaussKronrod21::instance();
  double kw = 0.0, gw = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    kw += rule.kronrod_weights[i];
    gw += rule.gauss_weights[i];
  }
  out.push_back(bound("Gauss-Kronrod weights sum to 2", std::max(std::abs(kw - 2), std::abs(gw - 2)),
                      1e-14));

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianTest test(ctx.uniform(-1.0, 1.0), 0.1);
    const double q = ctx.uniform(-200.0, 200.0);
    const cplx sum = halfline_fourier(Side::Left, q, test) + halfline_fourier(Side::Right, q, test);
    worst = std::max(worst, std::abs(sum - gaussian_fourier_full_line(test, q)));
  }
  out.push_back(bound("left + right half-lines give the Gaussian transform", worst, 1e-10));

  const GaussianTest far_left(-2.0, 0.1);
  const cplx right = halfline_fourier(Side::Right, 3.0, far_left);
  out.push_back({"support beyond the defect integrates to exact zero", right == cplx{}, ""});

  double herm = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianTest test(ctx.uniform(-0.5, 0.5), 0.1);
    const double q = ctx.uniform(0.0, 100.0);
    herm = std::max(herm, std::abs(halfline_fourier(Side::Left, -q, test) -
                                   std::conj(halfline_fourier(Side::Left, q, test))));
  }
  out.push_back(bound("I(-q) = conj I(q)", herm, 1e-12));
  return out;
}

std::vector<Check> scattering_suite(Context& ctx) {
  std::vector<Check> out;
  double unitarity = 0.0, sewing = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double k = ctx.uniform(0.01, 200.0);
    for (const DefectSpec& d : {DefectSpec::delta(ctx.nonzero(0.01, 20.0)),
                                DefectSpec::jump(ctx.nonzero(0.01, 20.0))}) {
      const ScatteringCoefficients c = coefficients(d, k);
      unitarity = std::max(unitarity, std::abs(std::norm(c.t) + std::norm(c.r) - 1.0));
      sewing = std::max(sewing, check_sewing(d, k));
    }
  }
  out.push_back(bound("|T|^2 + |R|^2 = 1", unitarity, 1e-13));
  out.push_back(bound("stationary states satisfy the sewing conditions", sewing, 1e-12));

  const double alpha = ctx.uniform(0.1, 5.0);
  const auto plus = bound_states(DefectSpec::jump(alpha));
  const auto minus = bound_states(DefectSpec::jump(-alpha));
  out.push_back({"jump bound states normalisable only for alpha > 0",
                 plus.size() == 2 && minus.empty(),
                 std::to_string(plus.size()) + " / " + std::to_string(minus.size())});
  double bs = 0.0;
  for (const auto& s : bound_state_candidates(DefectSpec::jump(alpha)))
    bs = std::max(bs, check_bound_state_sewing(DefectSpec::jump(alpha), s));
  out.push_back(bound("jump bound states satisfy the sewing conditions", bs, 1e-12));
  return out;
}

std::vector<Check> kernels_suite(Context& ctx) {
  std::vector<Check> out;
  const GaussianTest test(ctx.uniform(-0.3, 0.3), 0.1);
  const double lambda = ctx.nonzero(0.2, 5.0), alpha = ctx.nonzero(0.2, 5.0);
  const DefectSpec families[] = {DefectSpec::free(), DefectSpec::delta(lambda),
                                 DefectSpec::jump(alpha, false), DefectSpec::jump(alpha, true)};
  double herm = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const double kp = ctx.uniform(0.05, 50.0), k = ctx.uniform(0.05, 50.0);
    for (const DefectSpec& d : families)
      herm = std::max(herm, std::abs(kernel({kp, k, d, test}) - std::conj(kernel({k, kp, d, test}))));
  }
  out.push_back(bound("K(k', k) = conj K(k, k') for all four families", herm, 1e-11));

  double reduction = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double kp = ctx.uniform(0.05, 50.0), k = ctx.uniform(0.05, 50.0);
    const cplx free = kernel({kp, k, DefectSpec::free(), test});
    reduction = std::max(reduction, std::abs(kernel({kp, k, DefectSpec::delta(1e-8), test}) - free));
    reduction = std::max(reduction, std::abs(kernel({kp, k, DefectSpec::jump(1e-8), test}) - free));
  }
  out.push_back(bound("weak defects reduce to the free kernel", reduction, 1e-7));

  double identity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double kp = ctx.uniform(0.05, 50.0), k = ctx.uniform(0.05, 50.0);
    const double a = ctx.nonzero(0.05, 50.0);
    const cplx extra = theta_half_extra_term(kp, k, a, test);
    const cplx fix = fixing_term(kp, k, a, test);
    identity = std::max(identity, std::abs(extra + 2.0 * (2.0 * kPi) * fix) /
                                      std::max(1.0, std::abs(extra)));
  }
  out.push_back(bound("theta(0) = 1/2 term is -2x the fixing term", identity, 1e-14));

  double point = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double kp = ctx.uniform(0.05, 50.0), k = ctx.uniform(0.05, 50.0);
    const DefectSpec d = DefectSpec::jump(alpha);
    point = std::max(point, std::abs(defect_point_term(d, kp, k, test) -
                                     theta_half_extra_term(kp, k, alpha, test)));
    point = std::max(point, std::abs(defect_point_term(DefectSpec::delta(lambda), kp, k, test)));
  }
  out.push_back(bound("defect-point terms from the branch limits", point, 1e-12));
  return out;
}

std::vector<Check> spectral_suite(Context& ctx) {
  std::vector<Check> out;
  const GridSpec grid{32, 40.0};
  const GaussianTest test(ctx.uniform(-0.5, 0.5), 0.1);
  const double lambda = ctx.nonzero(0.2, 5.0), alpha = ctx.nonzero(0.2, 5.0);
  const DefectSpec families[] = {DefectSpec::free(), DefectSpec::delta(lambda),
                                 DefectSpec::jump(alpha, false), DefectSpec::jump(alpha, true)};
  double herm = 0.0, residual = 0.0, rayleigh_gap = 0.0;
  for (const DefectSpec& d : families) {
    ComplexMatrix raw = assemble_raw(d, test, grid, {ctx.threads});
    if (ctx.hermiticity_fault) raw(0, 1) += cplx{1e-6, 0.0};
    herm = std::max(herm, hermiticity_report(raw));
    const HermitianKernelMatrix m = mirror_to_hermitian(raw, {d, test, grid, 0.0});
    const SpectralResult r = lowest_eigenpair(m);
    residual = std::max(residual, r.residual_norm);
    // beta is a lower bound for every Rayleigh quotient.
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<cplx> v(grid.n);
      std::normal_distribution<double> normal;
      for (auto& x : v) x = {normal(ctx.rng), normal(ctx.rng)};
      cplx num{};
      double den = 0.0;
      for (std::size_t i = 0; i < grid.n; ++i) {
        cplx mv{};
        for (std::size_t j = 0; j < grid.n; ++j) mv += m.entries(i, j) * v[j];
        num += std::conj(v[i]) * mv;
        den += std::norm(v[i]);
      }
      rayleigh_gap = std::max(rayleigh_gap, r.beta - num.real() / den);
    }
  }
  out.push_back(bound("raw assembly is Hermitian", herm, 1e-11));
  out.push_back(bound("eigenpair residual", residual, 1e-8));
  out.push_back(bound("beta below random Rayleigh quotients", rayleigh_gap, 1e-12));

  const SpectralResult two = lowest_eigenpair(build_matrix(DefectSpec::free(), GaussianTest(), {2, 2.0}));
  out.push_back(bound("2x2 free matrix matches the hand value -0.018076",
                      std::abs(two.beta + 0.0180760622), 1e-8));
  return out;
}

std::vector<Check> conservation_suite(Context& ctx) {
  std::vector<Check> out;
  auto random_state = [&](const DefectSpec& d, int modes) {
    std::vector<Mode> m;
    for (int i = 0; i < modes; ++i)
      m.push_back({ctx.uniform(0.1, 3.0) + 3.0 * i, {ctx.uniform(-1, 1), ctx.uniform(-1, 1)}});
    return ModeSuperposition(m, d);
  };
  double jump = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ModeSuperposition s = random_state(DefectSpec::jump(ctx.nonzero(0.1, 10.0)), 2 + trial % 2);
    const double t = ctx.uniform(0.0, 2.0);
    for (Quantity q : {Quantity::Energy, Quantity::Momentum, Quantity::Probability})
      jump = std::max(jump, std::abs(boundary_rates(s, q, t).residual()));
  }
  out.push_back(bound("jump: corrected energy, momentum, probability conserved", jump, 1e-12));

  double delta_e = 0.0, delta_n = 0.0, delta_p = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ModeSuperposition s = random_state(DefectSpec::delta(ctx.nonzero(0.1, 10.0)), 2 + trial % 2);
    const double t = ctx.uniform(0.0, 2.0);
    delta_e = std::max(delta_e, std::abs(boundary_rates(s, Quantity::Energy, t).residual()));
    delta_n = std::max(delta_n, std::abs(boundary_rates(s, Quantity::Probability, t).bulk_flux_rate));
    delta_p = std::max(delta_p, delta_momentum_residual(s, t).deviation());
  }
  out.push_back(bound("delta: corrected energy conserved", delta_e, 1e-12));
  out.push_back(bound("delta: probability conserved without correction", delta_n, 1e-13));
  out.push_back(bound("delta: momentum rate equals the closed-form residual", delta_p, 1e-12));

  const double fix = fixing_term_consistency(ctx.nonzero(0.2, 10.0), GaussianTest(0.05, 0.1),
                                             {32, 40.0}, ctx.rng());
  out.push_back(bound("fixing-term kernel matches the defect correction", fix, 1e-10));
  return out;
}

std::vector<Check> scan_suite(Context& ctx) {
  std::vector<Check> out;
  SweepPlan plan;
  plan.family = DefectKind::Free;
  plan.x0_values = {-1.0, 0.0, 1.0};
  plan.grid = {64, 60.0};
  const auto rows = run_sweep(plan, {ctx.threads, false});
  double spread = 0.0;
  for (const auto& r : rows) spread = std::max(spread, std::abs(r.beta - rows[0].beta));
  out.push_back(bound("free beta independent of x0", spread, 1e-8));

  SweepPlan jump;
  jump.family = DefectKind::Jump;
  jump.conserved = true;
  jump.strengths = {-2.0, 3.0};
  jump.x0_values = {-0.2, 0.1};
  jump.grid = {24, 30.0};
  const std::string serial = to_csv(run_sweep(jump, {1, false}));
  const std::string parallel = to_csv(run_sweep(jump, {std::max(2u, ctx.threads), false}));
  out.push_back({"parallel and serial sweeps are byte-identical", serial == parallel, ""});

  const auto parsed = parse_csv(serial);
  out.push_back({"CSV round trip", to_csv(parsed) == serial, std::to_string(parsed.size()) + " rows"});
  return out;
}

}  // namespace

std::vector<SuiteReport> run_validation(const ValidationOptions& opts) {
  const auto& names = suite_names();
  for (const auto& s : opts.suites)
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw ConfigError("unknown suite '" + s + "'");
  if (!opts.inject_fault.empty() && opts.inject_fault != "hermiticity")
    throw ConfigError("unknown fault '" + opts.inject_fault + "' (expected hermiticity)");

  const std::function<std::vector<Check>(Context&)> runners[] = {
      quadrature_suite, scattering_suite, kernels_suite, spectral_suite, conservation_suite,
      scan_suite};
  std::vector<SuiteReport> reports;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!opts.suites.empty() &&
        std::find(opts.suites.begin(), opts.suites.end(), names[i]) == opts.suites.end())
      continue;
    // Each suite gets its own stream so filtering does not change the draws.
    Context ctx{std::mt19937_64(opts.seed * 1000003u + i), std::max(1u, opts.threads),
                opts.inject_fault == "hermiticity"};
    SuiteReport report{names[i], {}};
    try {
      report.checks = runners[i](ctx);
    } catch (const std::exception& e) {
      report.checks.push_back({"suite ran to completion", false, e.what()});
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace backflow
