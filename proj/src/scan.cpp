#include "backflow/scan.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "backflow/parallel.hpp"
#include "backflow/spectral.hpp"

#ifndef BACKFLOW_VERSION
#define BACKFLOW_VERSION "0.0.0"
#endif

namespace backflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite_list(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw ConfigError(std::string("the ") + what + " list is empty");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError(std::string("non-finite value in the ") + what + " list");
}

// Strength magnitudes step, 2 step, ..., count * step, both signs, ascending.
std::vector<double> symmetric_strengths(double step, int count) {
  std::vector<double> out;
  for (int i = count; i >= 1; --i) out.push_back(-step * i);
  for (int i = 1; i <= count; ++i) out.push_back(step * i);
  return out;
}

SweepPlan curve_plan(DefectKind family, double magnitude) {
  SweepPlan plan;
  plan.family = family;
  plan.strengths = {-magnitude, magnitude};
  plan.x0_values = default_x0_values(family);
  return plan;
}

}  // namespace

void SweepPlan::validate() const {
  require_finite_list(strengths, "strength");
  require_finite_list(x0_values, "x0");
  if (family == DefectKind::Free) {
    for (double s : strengths)
      if (s != 0.0) throw ConfigError("the free family takes no strength");
    if (conserved) throw ConfigError("the conserved flag only applies to the jump defect");
  } else {
    for (double s : strengths) DefectSpec::make(family, s, conserved);
  }
  GaussianTest(0.0, sigma, support_factor);
  grid.validate();
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> default_x0_values(DefectKind family, std::size_t count) {
  const double half_width = family == DefectKind::Delta ? 2.0 : 1.0;
  return linspace(-half_width, half_width, count);
}

SweepRow evaluate_point(const DefectSpec& defect, const GaussianTest& test, const GridSpec& grid,
                        const SweepOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.defect = defect.kind();
  row.strength = defect.strength();
  row.conserved = defect.conserved();
  row.x0 = test.x0();
  row.sigma = test.sigma();
  row.n = grid.n;
  row.p_cutoff = grid.p_cutoff;
  const HermitianKernelMatrix m = build_matrix(defect, test, grid, {resolve_threads(opts.threads)});
  const SpectralResult r = lowest_eigenpair(m);
  row.beta = r.beta;
  row.residual = r.residual_norm;
  if (opts.timing)
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan, const SweepOptions& opts) {
  plan.validate();
  const std::size_t nx = plan.x0_values.size();
  const std::size_t count = plan.strengths.size() * nx;
  const unsigned threads = resolve_threads(opts.threads);
  // Wide sweeps parallelise over points, short ones inside each assembly.
  const unsigned outer = count >= threads ? threads : 1;
  SweepOptions inner = opts;
  inner.threads = outer == 1 ? threads : 1;

  std::vector<SweepRow> rows(count);
  parallel_for(count, outer, [&](std::size_t idx) {
    const double strength = plan.strengths[idx / nx];
    const double x0 = plan.x0_values[idx % nx];
    const DefectSpec defect = plan.family == DefectKind::Free
                                  ? DefectSpec::free()
                                  : DefectSpec::make(plan.family, strength, plan.conserved);
    const GaussianTest test(x0, plan.sigma, plan.support_factor);
    try {
      rows[idx] = evaluate_point(defect, test, plan.grid, inner);
    } catch (const NumericalError& e) {
      SweepRow& row = rows[idx];
      row = SweepRow{};
      row.defect = plan.family;
      row.strength = defect.strength();
      row.conserved = plan.conserved;
      row.x0 = x0;
      row.sigma = plan.sigma;
      row.n = plan.grid.n;
      row.p_cutoff = plan.grid.p_cutoff;
      row.beta = kNaN;
      row.residual = kNaN;
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<ConvergenceEntry> convergence_study(const DefectSpec& defect, const GaussianTest& test,
                                                const std::vector<std::size_t>& n_values,
                                                const std::vector<double>& p_values,
                                                const SweepOptions& opts) {
  if (n_values.empty() || p_values.empty())
    throw ConfigError("convergence study needs at least one n and one cutoff");
  std::vector<ConvergenceEntry> out;
  for (double p : p_values) {
    for (std::size_t n : n_values) {
      const GridSpec grid{n, p};
      grid.validate();
      const SweepRow row = evaluate_point(defect, test, grid, opts);
      out.push_back({n, p, row.beta, row.residual});
    }
  }
  return out;
}

std::vector<Preset> presets(bool full) {
  std::vector<Preset> out;
  auto curve = [&](std::string name, std::string provenance, DefectKind family, double magnitude) {
    out.push_back({std::move(name), std::move(provenance), curve_plan(family, magnitude)});
  };
  curve("delta-fig1a", "delta defect curves, first figure, panel (a): lambda = +-0.5",
        DefectKind::Delta, 0.5);
  curve("delta-fig1b", "delta defect curves, first figure, panel (b): lambda = +-1",
        DefectKind::Delta, 1.0);
  curve("delta-fig2a", "delta defect curves, second figure, panel (a): lambda = +-5",
        DefectKind::Delta, 5.0);
  curve("delta-fig2b", "delta defect curves, second figure, panel (b): lambda = +-10",
        DefectKind::Delta, 10.0);

  const std::pair<double, double> jump_pairs[] = {
      {0.1, 0.2}, {1.0, 4.0}, {9.0, 10.0}, {20.0, 50.0}, {200.0, 1000.0}};
  auto short_num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  int figure = 3;
  for (const auto& [a, b] : jump_pairs) {
    const std::string base = "jump-fig" + std::to_string(figure);
    const std::string where = "jump defect curves, figure " + std::to_string(figure);
    curve(base + "a", where + ", panel (a): |alpha| = " + short_num(a), DefectKind::Jump, a);
    curve(base + "b", where + ", panel (b): |alpha| = " + short_num(b), DefectKind::Jump, b);
    ++figure;
  }

  {
    SweepPlan plan;
    plan.family = DefectKind::Delta;
    plan.strengths = {-0.6, -0.5, -0.4};
    plan.x0_values = default_x0_values(DefectKind::Delta);
    plan.grid = {500, 100.0};
    out.push_back({"delta-peak",
                   "attractive delta peak exploration around lambda = -1/2 (text, no figure)",
                   plan});
  }

  auto landscape = [&](std::string name, std::string provenance, DefectKind family,
                       bool conserved, std::vector<double> strengths) {
    SweepPlan plan;
    plan.family = family;
    plan.conserved = conserved;
    plan.strengths = std::move(strengths);
    plan.x0_values = default_x0_values(family);
    plan.grid = full ? GridSpec{2000, 200.0} : GridSpec{500, 100.0};
    out.push_back({std::move(name), std::move(provenance), plan});
  };
  landscape("landscape-fig8", "delta defect landscape (appendix)", DefectKind::Delta, false,
            symmetric_strengths(0.5, 20));
  landscape("landscape-fig9", "jump landscape, non-conserved current, large |alpha| (appendix)",
            DefectKind::Jump, false, symmetric_strengths(5.0, 20));
  landscape("landscape-fig10", "jump landscape, non-conserved current, small |alpha| (appendix)",
            DefectKind::Jump, false, symmetric_strengths(0.25, 20));
  landscape("landscape-fig11", "jump landscape, conserved current, large |alpha| (appendix)",
            DefectKind::Jump, true, symmetric_strengths(5.0, 20));
  landscape("landscape-fig12", "jump landscape, conserved current, small |alpha| (appendix)",
            DefectKind::Jump, true, symmetric_strengths(0.25, 20));
  return out;
}

Preset find_preset(const std::string& name, bool full) {
  std::string names;
  for (Preset& p : presets(full)) {
    if (p.name == name) return p;
    names += (names.empty() ? "" : ", ") + p.name;
  }
  throw ConfigError("unknown preset '" + name + "'; available: " + names);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += to_string(r.defect);
    out += ',' + format_double(r.strength);
    out += r.conserved ? ",true" : ",false";
    out += ',' + format_double(r.x0);
    out += ',' + format_double(r.sigma);
    out += ',' + std::to_string(r.n);
    out += ',' + format_double(r.p_cutoff);
    out += ',' + format_double(r.beta);
    out += ',' + format_double(r.residual);
    out += ',' + format_double(r.wall_s);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json row_json(const SweepRow& r) {
  nlohmann::json j;
  j["defect"] = to_string(r.defect);
  j["strength"] = r.strength;
  j["conserved"] = r.conserved;
  j["x0"] = r.x0;
  j["sigma"] = r.sigma;
  j["n"] = r.n;
  j["p_cutoff"] = r.p_cutoff;
  j["beta"] = r.beta;  // NaN serialises as null
  j["residual"] = r.residual;
  j["wall_s"] = r.wall_s;
  return j;
}

}  // namespace

std::string to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepRow& r : rows) arr.push_back(row_json(r));
  return arr.dump(2) + "\n";
}

std::string manifest_json(const SweepPlan& plan, const std::vector<SweepRow>& rows,
                          const ManifestInfo& info) {
  nlohmann::json m;
  m["version"] = BACKFLOW_VERSION;
  m["started_at"] = info.started_at;
  m["command_line"] = info.command_line;
  m["threads"] = info.threads;
  m["preset"] = info.preset.empty() ? nlohmann::json(nullptr) : nlohmann::json(info.preset);
  if (!info.preset.empty()) {
    for (const Preset& p : presets())
      if (p.name == info.preset) m["provenance"] = p.provenance;
  }
  nlohmann::json& p = m["plan"];
  p["family"] = to_string(plan.family);
  p["conserved"] = plan.conserved;
  p["strengths"] = plan.strengths;
  p["x0_values"] = plan.x0_values;
  p["sigma"] = plan.sigma;
  p["support_factor"] = plan.support_factor;
  p["n"] = plan.grid.n;
  p["p_cutoff"] = plan.grid.p_cutoff;
  m["rows"] = rows.size();
  nlohmann::json failures = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    if (!r.failed()) continue;
    failures.push_back({{"strength", r.strength}, {"x0", r.x0}, {"error", r.error}});
  }
  m["failures"] = failures;
  return m.dump(2) + "\n";
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("CSV header does not match the sweep schema");
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 10 fields");
    SweepRow r;
    r.defect = parse_defect_kind(f[0]);
    r.strength = parse_number(f[1], line_no);
    if (f[2] != "true" && f[2] != "false")
      throw ConfigError("line " + std::to_string(line_no) + ": conserved must be true|false");
    r.conserved = f[2] == "true";
    r.x0 = parse_number(f[3], line_no);
    r.sigma = parse_number(f[4], line_no);
    r.n = static_cast<std::size_t>(parse_number(f[5], line_no));
    r.p_cutoff = parse_number(f[6], line_no);
    r.beta = parse_number(f[7], line_no);
    r.residual = parse_number(f[8], line_no);
    r.wall_s = parse_number(f[9], line_no);
    rows.push_back(r);
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string manifest_path(const std::string& result_path) {
  return result_path + ".manifest.json";
}

std::string current_utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace backflow
