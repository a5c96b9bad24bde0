#include "backflow/core.hpp"

#include <cmath>
#include <cstdlib>

#include "backflow/parallel.hpp"

namespace backflow {

std::string to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::Free: return "free";
    case DefectKind::Delta: return "delta";
    case DefectKind::Jump: return "jump";
  }
  return "unknown";
}

DefectKind parse_defect_kind(const std::string& name) {
  if (name == "free") return DefectKind::Free;
  if (name == "delta") return DefectKind::Delta;
  if (name == "jump") return DefectKind::Jump;
  throw ConfigError("unknown defect kind '" + name + "' (expected free|delta|jump)");
}

DefectSpec DefectSpec::delta(double lambda) {
  return make(DefectKind::Delta, lambda, false);
}

DefectSpec DefectSpec::jump(double alpha, bool conserved) {
  return make(DefectKind::Jump, alpha, conserved);
}

DefectSpec DefectSpec::make(DefectKind kind, double strength, bool conserved) {
  if (kind == DefectKind::Free) {
    if (conserved) throw ConfigError("the conserved flag only applies to the jump defect");
    return DefectSpec{};
  }
  const std::string name = to_string(kind);
  if (!std::isfinite(strength))
    throw ConfigError(name + " strength must be finite");
  if (strength == 0.0)
    throw ConfigError(name + " strength 0 is the free particle; use --defect free");
  if (conserved && kind != DefectKind::Jump)
    throw ConfigError("the conserved flag only applies to the jump defect");
  return DefectSpec{kind, strength, conserved};
}

GaussianTest::GaussianTest(double x0, double sigma, double support_factor)
    : x0_(x0), sigma_(sigma), support_factor_(support_factor) {
  if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  if (!(support_factor > 0.0) || !std::isfinite(support_factor))
    throw ConfigError("support factor must be positive");
}

double GaussianTest::operator()(double x) const {
  if (x < support_lo() || x > support_hi()) return 0.0;
  const double z = (x - x0_) / sigma_;
  return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * kPi));
}

void GridSpec::validate() const {
  // n = 1 is accepted as a degenerate single-cell grid.
  if (n < 1) throw ConfigError("grid needs at least one cell");
  if (!(p_cutoff > 0.0) || !std::isfinite(p_cutoff))
    throw ConfigError("momentum cutoff must be positive");
}

std::vector<double> make_grid(const GridSpec& spec) {
  spec.validate();
  const double h = spec.step();
  std::vector<double> nodes(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i)
    nodes[i] = (static_cast<double>(i) + 0.5) * h;
  return nodes;
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<cplx> row_major)
    : dim_(dim), data_(row_major) {
  if (data_.size() != dim * dim) throw ConfigError("matrix initialiser has wrong size");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BACKFLOW_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace backflow
