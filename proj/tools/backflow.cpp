// backflow: lowest eigenvalue of the smeared current operator near a point defect.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "backflow/conservation.hpp"
#include "backflow/core.hpp"
#include "backflow/kernels.hpp"
#include "backflow/parallel.hpp"
#include "backflow/scan.hpp"
#include "backflow/validation.hpp"

using namespace backflow;

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfig = 2, kNumeric = 3 };

struct DefectFlags {
  std::string defect = "free";
  bool conserved = false;
};

struct TestFlags {
  double x0 = 0.0;
  double sigma = 0.1;
  double support_factor = 8.0;
};

struct GridFlags {
  std::size_t n = 2000;
  double pcut = 200.0;
};

void add_defect_flags(CLI::App* cmd, DefectFlags& f) {
  cmd->add_option("--defect", f.defect, "free|delta|jump")->capture_default_str();
  cmd->add_flag("--conserved", f.conserved,
                "jump only: include the defect-located momentum correction");
}

void add_test_flags(CLI::App* cmd, TestFlags& f, bool with_x0) {
  if (with_x0) cmd->add_option("--x0", f.x0, "centre of the Gaussian test function")->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "width of the Gaussian")->capture_default_str();
  cmd->add_option("--support-factor", f.support_factor, "truncate at x0 +- factor*sigma")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* cmd, GridFlags& f) {
  cmd->add_option("--n", f.n, "number of momentum cells")->capture_default_str();
  cmd->add_option("--pcut", f.pcut, "momentum cutoff")->capture_default_str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw ConfigError(std::string("empty entry in the ") + what + " list");
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size())
      throw ConfigError(std::string("bad ") + what + " value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

void emit(const std::vector<SweepRow>& rows, const std::string& format, const std::string& out,
          const SweepPlan& plan, const ManifestInfo& info) {
  if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
  const std::string body = format == "csv" ? to_csv(rows) : to_json(rows);
  if (out.empty() || out == "-") {
    std::cout << body;
    return;
  }
  write_file_atomic(out, body);
  write_file_atomic(manifest_path(out), manifest_json(plan, rows, info));
}

std::string preset_listing() {
  std::string s = "Presets (scan --preset NAME):\n";
  for (const Preset& p : presets()) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-16s %s\n", p.name.c_str(), p.provenance.c_str());
    s += line;
  }
  s += "Curve presets run the non-conserved current unless --conserved is given.\n";
  s += "Landscapes use n=500, pcut=100; --full selects n=2000, pcut=200.\n";
  return s;
}

int report_rows_failures(const std::vector<SweepRow>& rows) {
  int failures = 0;
  for (const auto& r : rows)
    if (r.failed()) {
      ++failures;
      std::cerr << "point strength=" << format_double(r.strength) << " x0=" << format_double(r.x0)
                << " failed: " << r.error << "\n";
    }
  return failures;
}

// ---- conservation ----

int run_conservation(const DefectSpec& defect, std::uint64_t seed, int states) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), span(0.1, 3.0), time(0.0, 2.0);
  auto random_state = [&](int modes) {
    std::vector<Mode> m;
    for (int i = 0; i < modes; ++i) m.push_back({span(rng) + 3.0 * i, {unit(rng), unit(rng)}});
    return ModeSuperposition(m, defect);
  };

  constexpr double kLimit = 1e-12;
  double worst[3] = {0, 0, 0};
  double momentum_match = 0.0, momentum_size = 0.0;
  for (int s = 0; s < states; ++s) {
    const ModeSuperposition st = random_state(2 + s % 2);
    const double t = time(rng);
    int qi = 0;
    for (Quantity q : {Quantity::Energy, Quantity::Momentum, Quantity::Probability}) {
      const RatePair r = boundary_rates(st, q, t);
      if (r.has_correction) worst[qi] = std::max(worst[qi], std::abs(r.residual()));
      ++qi;
    }
    if (defect.kind() == DefectKind::Delta) {
      const DeltaMomentumResidual d = delta_momentum_residual(st, t);
      momentum_match = std::max(momentum_match, d.deviation());
      momentum_size = std::max(momentum_size, std::abs(d.flux_rate));
    }
  }

  bool ok = true;
  std::printf("defect %s strength %s, %d random states, seed %llu\n", to_string(defect.kind()).c_str(),
              format_double(defect.strength()).c_str(), states,
              static_cast<unsigned long long>(seed));
  const char* names[] = {"energy", "momentum", "probability"};
  for (int qi = 0; qi < 3; ++qi) {
    if (qi == 1 && defect.kind() == DefectKind::Delta) {
      const bool match = momentum_match <= kLimit;
      ok = ok && match;
      std::printf("  %-12s non-conserved, residual %s closed form (max |P_t| %.3e, deviation %.3e)\n",
                  names[qi], match ? "matches" : "DOES NOT match", momentum_size, momentum_match);
      continue;
    }
    const bool pass = worst[qi] <= kLimit;
    ok = ok && pass;
    std::printf("  %-12s conserved, max residual %.3e  %s\n", names[qi], worst[qi],
                pass ? "ok" : "FAIL");
  }
  if (defect.kind() == DefectKind::Jump) {
    const double fix = fixing_term_consistency(defect.strength(), GaussianTest(0.05, 0.1), {32, 40.0}, seed);
    const bool pass = fix <= 1e-10;
    ok = ok && pass;
    std::printf("  %-12s fixing-term kernel vs defect correction, max deviation %.3e  %s\n",
                "fixing-term", fix, pass ? "ok" : "FAIL");
  }
  return ok ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest eigenvalue of the smeared probability current near a point defect"};
  app.require_subcommand(1);
  app.footer(preset_listing());
  app.set_version_flag("--version", std::string(BACKFLOW_VERSION_STRING));

  unsigned threads = 0;
  bool no_timing = false;

  // beta
  DefectFlags beta_defect;
  TestFlags beta_test;
  GridFlags beta_grid;
  double beta_strength = 0.0;
  std::string beta_format = "csv", beta_out;
  CLI::App* beta = app.add_subcommand("beta", "Evaluate one point; prints a CSV (or JSON) row");
  add_defect_flags(beta, beta_defect);
  beta->add_option("--strength", beta_strength, "lambda (delta) or alpha (jump)");
  add_test_flags(beta, beta_test, true);
  add_grid_flags(beta, beta_grid);
  beta->add_option("--threads", threads, "worker threads (default: BACKFLOW_THREADS or all cores)");
  beta->add_option("--format", beta_format, "csv|json")->capture_default_str();
  beta->add_option("--out", beta_out, "write to a file instead of standard output");
  beta->add_flag("--no-timing", no_timing, "write wall_s as 0");

  // scan
  DefectFlags scan_defect;
  TestFlags scan_test;
  GridFlags scan_grid;
  std::string scan_strengths, scan_x0, scan_preset, scan_format = "csv", scan_out;
  bool scan_full = false;
  CLI::App* scan = app.add_subcommand("scan", "Sweep beta over strengths and x0 positions");
  scan->add_option("--preset", scan_preset, "named figure preset (see below)");
  scan->add_flag("--full", scan_full, "landscape presets at n=2000, pcut=200");
  add_defect_flags(scan, scan_defect);
  scan->add_option("--strength", scan_strengths, "comma-separated strengths");
  scan->add_option("--x0", scan_x0, "comma-separated x0 values (default: 81 points)");
  add_test_flags(scan, scan_test, false);
  add_grid_flags(scan, scan_grid);
  scan->add_option("--threads", threads, "worker threads (default: BACKFLOW_THREADS or all cores)");
  scan->add_option("--format", scan_format, "csv|json")->capture_default_str();
  scan->add_option("--out", scan_out, "result file; a manifest is written next to it");
  scan->add_flag("--no-timing", no_timing, "write wall_s as 0 so reruns are byte-identical");

  // validate
  std::vector<std::string> suites;
  std::uint64_t validate_seed = 1;
  std::string fault;
  CLI::App* validate = app.add_subcommand("validate", "Run the reduced-scale self-check suites");
  validate->add_option("--suite", suites, "restrict to the named suites (repeatable)");
  validate->add_option("--seed", validate_seed, "random seed")->capture_default_str();
  validate->add_option("--threads", threads, "worker threads");
  validate->add_option("--inject-fault", fault, "test hook: hermiticity");

  // conservation
  DefectFlags cons_defect;
  double cons_strength = 0.0;
  std::uint64_t cons_seed = 1;
  int cons_states = 100;
  CLI::App* cons = app.add_subcommand("conservation", "Check the defect conservation laws");
  cons->add_option("--defect", cons_defect.defect, "free|delta|jump")->capture_default_str();
  cons->add_option("--strength", cons_strength, "lambda (delta) or alpha (jump)");
  cons->add_option("--seed", cons_seed, "random seed")->capture_default_str();
  cons->add_option("--states", cons_states, "number of random superpositions")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*beta) {
      const DefectSpec defect =
          DefectSpec::make(parse_defect_kind(beta_defect.defect), beta_strength, beta_defect.conserved);
      const GaussianTest test(beta_test.x0, beta_test.sigma, beta_test.support_factor);
      const GridSpec grid{beta_grid.n, beta_grid.pcut};
      grid.validate();
      SweepPlan plan;
      plan.family = defect.kind();
      plan.conserved = defect.conserved();
      plan.strengths = {defect.strength()};
      plan.x0_values = {test.x0()};
      plan.sigma = test.sigma();
      plan.support_factor = test.support_factor();
      plan.grid = grid;
      const auto started = current_utc_timestamp();
      const SweepRow row = evaluate_point(defect, test, grid, {threads, !no_timing});
      emit({row}, beta_format, beta_out, plan,
           {"", join_argv(argc, argv), started, resolve_threads(threads)});
      return kOk;
    }

    if (*scan) {
      SweepPlan plan;
      if (!scan_preset.empty()) {
        plan = find_preset(scan_preset, scan_full).plan;
        if (scan_defect.conserved) {
          if (plan.family != DefectKind::Jump)
            throw ConfigError("--conserved only applies to jump presets");
          plan.conserved = true;
        }
        // Explicit flags override the preset's resolution and measurement window.
        if (scan->count("--n")) plan.grid.n = scan_grid.n;
        if (scan->count("--pcut")) plan.grid.p_cutoff = scan_grid.pcut;
        if (scan->count("--sigma")) plan.sigma = scan_test.sigma;
        if (scan->count("--support-factor")) plan.support_factor = scan_test.support_factor;
        if (scan->count("--x0")) plan.x0_values = parse_list(scan_x0, "x0");
        if (scan->count("--strength")) throw ConfigError("--strength cannot be combined with --preset");
      } else {
        if (scan_full) throw ConfigError("--full only applies to presets");
        plan.family = parse_defect_kind(scan_defect.defect);
        plan.conserved = scan_defect.conserved;
        if (plan.family == DefectKind::Free) {
          if (scan->count("--strength") && !parse_list(scan_strengths, "strength").empty())
            throw ConfigError("the free family takes no strength");
          plan.strengths = {0.0};
        } else {
          if (!scan->count("--strength")) throw ConfigError("--strength is required for " + scan_defect.defect);
          plan.strengths = parse_list(scan_strengths, "strength");
        }
        plan.x0_values = scan->count("--x0") ? parse_list(scan_x0, "x0") : default_x0_values(plan.family);
        plan.sigma = scan_test.sigma;
        plan.support_factor = scan_test.support_factor;
        plan.grid = {scan_grid.n, scan_grid.pcut};
      }
      plan.validate();
      const auto started = current_utc_timestamp();
      const auto rows = run_sweep(plan, {threads, !no_timing});
      emit(rows, scan_format, scan_out, plan,
           {scan_preset, join_argv(argc, argv), started, resolve_threads(threads)});
      return report_rows_failures(rows) ? kNumeric : kOk;
    }

    if (*validate) {
      ValidationOptions opts;
      opts.suites = suites;
      opts.seed = validate_seed;
      opts.threads = resolve_threads(threads);
      opts.inject_fault = fault;
      const auto reports = run_validation(opts);
      bool all = true;
      for (const auto& r : reports) {
        std::printf("[%s] %s\n", r.passed() ? "PASS" : "FAIL", r.suite.c_str());
        for (const auto& c : r.checks)
          std::printf("    %s %s%s%s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(),
                      c.detail.empty() ? "" : ": ", c.detail.c_str());
        all = all && r.passed();
      }
      std::printf("%zu suites, %s\n", reports.size(), all ? "all passed" : "FAILURES");
      return all ? kOk : kValidationFailed;
    }

    if (*cons) {
      if (cons_states < 1) throw ConfigError("--states must be positive");
      const DefectSpec defect =
          DefectSpec::make(parse_defect_kind(cons_defect.defect), cons_strength, false);
      return run_conservation(defect, cons_seed, cons_states);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
