#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hfrac/cell.hpp"
#include "hfrac/datum.hpp"
#include "hfrac/evolution.hpp"
#include "hfrac/grid.hpp"
#include "hfrac/medium.hpp"
#include "hfrac/mincut.hpp"
#include "hfrac/sweep.hpp"

namespace hfrac {

struct VerifySettings {
  /// Steps to verify; empty means every step.
  std::vector<std::size_t> steps;
  int budget = 256;
  std::uint64_t seed = 0;
};

struct CellSettings {
  int dimension = 2;
  TableOptions table;
  std::optional<std::array<double, 2>> scaling;
};

struct SweepSettings {
  SweepOptions options;
  /// Precomputed effective table to use instead of computing one.
  std::optional<std::filesystem::path> table;
};

/// YAML run description. Every accessor validates its section, rejects
/// unknown keys and throws ConfigError naming the offending key.
///
///   grid:      dimension, extent, nodes, origin, dirichlet, dirichlet_nodes
///   medium:    p, alpha, beta, epsilon, bulk, bulk_y, toughness, toughness_y
///   datum:     times | t_end + dt, profile, file, bound
///   evolution: backend, candidates, tie_tolerance, check_invariants,
///              verify_each_step, verify_budget
///   verify:    steps, budget, seed
///   cell:      dimension, resolution, directions, magnitudes, power_family,
///              strip_cells, scaling
///   sweep:     dimension, epsilons, nodes, t_end, dt, tolerance,
///              lsc_tolerance, table_resolution, table
///   probe:     sequence, line_y, edges_file, centers, radii, nu, ns
///
/// A field is a number (constant) or a map with `kind` in constant, layered,
/// checkerboard, table. Tables load from CSV with an index column first and
/// a `value` column. Relative file paths resolve against the config file.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, const std::filesystem::path& base_dir = {});

  bool has(const std::string& section) const;

  Grid grid() const;
  MediumSpec medium_spec() const;
  /// Scale of periodic sampling when medium.epsilon is set.
  std::optional<double> epsilon() const;
  Medium medium(const Grid& grid) const;
  BoundaryDatum datum(const Grid& grid) const;
  EvolutionOptions evolution() const;
  VerifySettings verify() const;
  CellSettings cell() const;
  SweepSettings sweep() const;
  SigmaProbeRequest probe() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace hfrac
