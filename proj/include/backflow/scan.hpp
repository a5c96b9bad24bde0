#pragma once

#include <string>
#include <vector>

#include "backflow/core.hpp"

namespace backflow {

/// A grid of (strength, x0) points sharing one defect family and one grid.
/// The free family carries the single placeholder strength 0.
struct SweepPlan {
  DefectKind family = DefectKind::Free;
  bool conserved = false;
  std::vector<double> strengths{0.0};
  std::vector<double> x0_values;
  double sigma = 0.1;
  double support_factor = 8.0;
  GridSpec grid;

  void validate() const;
};

/// Default measurement window: [-2, 2] for delta, [-1, 1] otherwise.
std::vector<double> default_x0_values(DefectKind family, std::size_t count = 81);

/// Uniform points lo, ..., hi (inclusive).
std::vector<double> linspace(double lo, double hi, std::size_t count);

struct SweepRow {
  DefectKind defect = DefectKind::Free;
  double strength = 0.0;
  bool conserved = false;
  double x0 = 0.0;
  double sigma = 0.1;
  std::size_t n = 0;
  double p_cutoff = 0.0;
  double beta = 0.0;      // NaN when the point failed
  double residual = 0.0;  // NaN when the point failed
  double wall_s = 0.0;
  std::string error;      // empty on success

  bool failed() const { return !error.empty(); }
};

struct SweepOptions {
  unsigned threads = 1;
  bool timing = true;  // false: wall_s is written as 0 so output is reproducible
};

/// One row per (strength, x0), ordered by strength then x0 as listed in the
/// plan. A point that fails numerically yields a NaN row with an error note.
std::vector<SweepRow> run_sweep(const SweepPlan& plan, const SweepOptions& opts = {});

/// Single point, failures propagate as exceptions.
SweepRow evaluate_point(const DefectSpec& defect, const GaussianTest& test, const GridSpec& grid,
                        const SweepOptions& opts = {});

struct ConvergenceEntry {
  std::size_t n;
  double p_cutoff;
  double beta;
  double residual;
};

/// beta on every (n, p_cutoff) pair, n varying fastest.
std::vector<ConvergenceEntry> convergence_study(const DefectSpec& defect, const GaussianTest& test,
                                                const std::vector<std::size_t>& n_values,
                                                const std::vector<double>& p_values,
                                                const SweepOptions& opts = {});

struct Preset {
  std::string name;
  std::string provenance;  // which published figure the preset redraws
  SweepPlan plan;
};

/// Every named preset. `full` switches landscapes to n = 2000, p_cutoff = 200.
std::vector<Preset> presets(bool full = false);

/// Throws ConfigError listing the available names when `name` is unknown.
Preset find_preset(const std::string& name, bool full = false);

// Output. All files are written to a temporary sibling and renamed into place.

inline constexpr const char* kCsvHeader =
    "defect,strength,conserved,x0,sigma,n,p_cutoff,beta,residual,wall_s";

/// printf %.17g, enough digits for an exact round trip; nan/inf spelled out.
std::string format_double(double value);

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows);

struct ManifestInfo {
  std::string preset;  // empty when the plan came from flags
  std::string command_line;
  std::string started_at;  // ISO 8601 UTC
  unsigned threads = 1;
};

std::string manifest_json(const SweepPlan& plan, const std::vector<SweepRow>& rows,
                          const ManifestInfo& info);

/// Parses a CSV produced by to_csv; the header must match exactly.
std::vector<SweepRow> parse_csv(const std::string& text);

void write_file_atomic(const std::string& path, const std::string& contents);

/// Path of the manifest written next to a result file: <path>.manifest.json.
std::string manifest_path(const std::string& result_path);

std::string current_utc_timestamp();

}  // namespace backflow
