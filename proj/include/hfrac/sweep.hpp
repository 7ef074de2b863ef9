#pragma once

#include <string>
#include <vector>

#include "hfrac/cell.hpp"
#include "hfrac/evolution.hpp"

namespace hfrac {

struct SweepOptions {
  /// 1: bar on [0,1] loaded at both ends. 2: unit square loaded on bottom/top.
  int dimension = 1;
  /// Strictly decreasing.
  std::vector<double> epsilons;
  /// Nodes per axis; 0 picks h = min(epsilon) / 16.
  int nodes = 0;
  double t_end = 1.5;
  double dt = 0.01;
  /// Relative deviation allowed at the last epsilon.
  double tolerance = 0.05;
  /// Relative lower-semicontinuity slack.
  double lsc_tolerance = 0.02;
  int table_resolution = 64;
  int jobs = 1;
  ConvexSolveOptions solver;
};

struct SweepCurve {
  double epsilon = 0.0;  // 0 for the homogenized run
  std::vector<EnergyBreakdown> energy;
  /// First step with a nonempty crack (steps.size() if none).
  std::size_t crack_step = 0;
};

struct Deviation {
  double total = 0.0;
  double bulk = 0.0;
  double surface = 0.0;
};

struct SweepVerdict {
  bool total = false;
  bool bulk = false;
  bool surface = false;
  bool ok() const { return total && bulk && surface; }
};

struct SweepReport {
  int dimension = 1;
  std::string backend;
  std::string family;
  int nodes = 0;
  std::vector<double> times;
  std::vector<SweepCurve> runs;
  SweepCurve homogenized;
  /// Homogenized medium used: bulk and toughness along each axis.
  std::array<double, 2> a_hom{0.0, 0.0};
  std::array<double, 2> kappa_hom{0.0, 0.0};
  /// Per epsilon: max over t of |E_eps - E_hom| divided by max over t of the
  /// homogenized curve of the same component.
  std::vector<Deviation> deviation;
  double tolerance = 0.05;
  SweepVerdict verdict;
};

/// Last deviation within tolerance and at most half the first one.
SweepVerdict convergence_verdict(const std::vector<Deviation>& dev, double tolerance);

/// Runs the evolution of the epsilon-periodic medium for every epsilon and of
/// the homogenized medium built from `table`. Throws ConfigError when a grid
/// does not resolve an epsilon (h > epsilon / 8).
SweepReport run_sweep(const MediumSpec& cell, const EffectiveDensityTable& table,
                      const SweepOptions& options);
/// Same with a power-family table computed at options.table_resolution.
SweepReport run_sweep(const MediumSpec& cell, const SweepOptions& options);

struct LscRow {
  double t = 0.0;
  /// (min over the finest half of epsilons of E_eps(t) - E_hom(t)) / max E_hom
  double total_margin = 0.0;
  double surface_margin = 0.0;
  bool pass = false;
};

struct LscReport {
  double tolerance = 0.02;
  std::vector<LscRow> rows;
  double worst_margin = 0.0;
  bool ok() const;
};

LscReport lsc_checks(const SweepReport& report, double tolerance = 0.02);

/// epsilon,t,bulk,surface,total,bulk_hom,surface_hom,total_hom,dev_total
std::string sweep_csv(const SweepReport& report);
/// key=value lines in a fixed order.
std::string sweep_verdict_text(const SweepReport& report, const LscReport& lsc);

}  // namespace hfrac
