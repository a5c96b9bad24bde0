#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace backflow {

// Reduced-scale self-checks of every module, run by `backflow validate`.

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const;
};

struct ValidationOptions {
  std::vector<std::string> suites;  // empty: all
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Test hook: "hermiticity" corrupts one raw matrix entry before the
  // Hermiticity checks of the spectral suite.
  std::string inject_fault;
};

const std::vector<std::string>& suite_names();

/// Runs the selected suites in the order of suite_names(). Unknown suite or
/// fault names throw ConfigError.
std::vector<SuiteReport> run_validation(const ValidationOptions& opts = {});

}  // namespace backflow
