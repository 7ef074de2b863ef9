#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hfrac/lattice_energy.hpp"
#include "hfrac/medium.hpp"

namespace hfrac {

/// f_hom(xi) = min over periodic correctors phi of the cell average of
/// a(y)|xi + grad phi|^p, on a periodic lattice with `resolution` nodes per
/// axis (>= 16). The corrector is pinned at one node; the cell energy does
/// not depend on its mean.
double f_hom_cell(const MediumSpec& cell, int dimension, std::array<double, 2> xi, int resolution,
                  const ConvexSolveOptions& options = {});

/// Integer lattice normal (n1, n2) with max(|n1|, |n2|) <= 8.
struct LatticeDirection {
  int n1 = 0;
  int n2 = 1;
  std::array<double, 2> unit() const;
  /// l1 length of the period vector (n2, -n1).
  int l1() const { return std::abs(n1) + std::abs(n2); }
};

/// Closest lattice normal to the angle phi (radians).
LatticeDirection lattice_direction(double phi);

/// Minimal cost per unit lattice length of a periodic cut with mean normal
/// nu, found as a min cut on a strip of `strip_cells` periods with sheared
/// periodic identification along the tangent. Costs are measured against the
/// lattice (l1) length of the period, so kappa == c gives c in every
/// direction. In 1D this is the minimum toughness over the cell.
double g_hom_cell(const MediumSpec& cell, int dimension, LatticeDirection nu, int resolution,
                  int strip_cells = 1);

struct BulkEntry {
  std::array<double, 2> xi{0.0, 0.0};
  double value = 0.0;
  /// |value(R) - value(R/2)|
  double diagnostic = 0.0;
};

struct SurfaceEntry {
  LatticeDirection direction;
  std::array<double, 2> nu{0.0, 1.0};
  double value = 0.0;
  double diagnostic = 0.0;
};

struct EffectiveDensityTable {
  int dimension = 2;
  int resolution = 64;
  double p = 2.0;
  std::vector<BulkEntry> bulk;
  std::vector<SurfaceEntry> surface;

  /// Exact lookup of a bulk sample; throws ConfigError if absent.
  double f_hom(std::array<double, 2> xi) const;
  double g_hom(std::array<double, 2> nu) const;
};

struct TableOptions {
  int resolution = 64;
  int directions = 16;
  std::vector<double> magnitudes{0.5, 1.0, 1.5, 2.0};
  /// f(x, xi) = a(x)|xi|^p: store unit-magnitude samples only.
  bool power_family = false;
  int strip_cells = 1;
  int jobs = 1;
  ConvexSolveOptions solver;
};

EffectiveDensityTable build_effective_table(const MediumSpec& cell, int dimension,
                                            const TableOptions& options);

/// Checks of a table against the cell's bounds. Each failed check appends a
/// line to `failures`.
struct TableChecks {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};
TableChecks check_effective_table(const EffectiveDensityTable& table, const MediumSpec& cell);

std::string effective_table_csv(const EffectiveDensityTable& table);
EffectiveDensityTable read_effective_table(const std::filesystem::path& path);

/// Compares f_hom of c1*a with c1*f_hom(a) and g_hom of c2*kappa with
/// c2*g_hom(kappa).
struct ScalingRow {
  std::string kind;
  std::array<double, 2> sample{0.0, 0.0};
  double base = 0.0;
  double scaled = 0.0;
  double expected = 0.0;
  double relative_error = 0.0;
};
struct ScalingReport {
  double c1 = 1.0;
  double c2 = 1.0;
  double tolerance = 1e-10;
  std::vector<ScalingRow> rows;
  bool passed() const;
};
ScalingReport scaling_check(double c1, double c2, const MediumSpec& cell, int dimension,
                            int resolution, const std::vector<std::array<double, 2>>& xis,
                            const std::vector<LatticeDirection>& nus, int jobs = 1);

}  // namespace hfrac
