#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hfrac/fields.hpp"
#include "hfrac/grid.hpp"
#include "hfrac/lattice_energy.hpp"
#include "hfrac/medium.hpp"

namespace hfrac {

struct ElasticSolution {
  ScalarField u;
  double bulk_energy = 0.0;
  /// Mean gradient per cell (cracked components count as zero).
  std::vector<std::array<double, 2>> cell_gradient;
  /// Work integrand against the datum rate passed to solve(); 0 if none.
  double theta = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Lattice energy sum_cells a(x)|grad u|^p |cell| with the gradient sampled
/// at cell corners from the two incident edges. For p = 2 this is the
/// five-point stencil with edge coefficient = mean of the adjacent cells.
LatticeEnergy bulk_energy_model(const Grid& grid, const Medium& medium);

/// Unilateral bulk minimisation for a fixed crack: u = psi on Dirichlet nodes
/// whose ghost edge is intact, free jumps across cracked edges.
///
/// Components not reached by any intact Dirichlet node take the mean of
/// `previous` over the component, or zero without a previous field; either
/// way clamped to the datum's sup norm.
class ElasticSolver {
 public:
  ElasticSolver(const Grid& grid, const Medium& medium, ConvexSolveOptions options = {});

  const Grid& grid() const { return *grid_; }
  const Medium& medium() const { return *medium_; }
  const LatticeEnergy& model() const { return model_; }

  ElasticSolution solve(const CrackState& crack, std::span<const double> datum,
                        const ScalarField* previous = nullptr,
                        std::span<const double> datum_rate = {}) const;

  /// Optimal bulk energy only.
  double optimal_bulk_energy(const CrackState& crack, std::span<const double> datum) const;

  double bulk_energy(std::span<const double> u, const CrackState& crack) const;

  /// theta = E'(u)[w] with w the energy-minimal extension of the rate over
  /// the same crack.
  double work_integrand(const ElasticSolution& sol, const CrackState& crack,
                        std::span<const double> datum_rate) const;

 private:
  struct Constraints {
    std::vector<std::uint8_t> fixed;
    std::vector<double> values;
  };
  Constraints constrain(const CrackState& crack, std::span<const double> datum,
                        const ScalarField* previous) const;
  std::vector<double> extension(const CrackState& crack, std::span<const double> datum,
                                const ScalarField* previous) const;

  const Grid* grid_;
  const Medium* medium_;
  ConvexSolveOptions options_;
  LatticeEnergy model_;
};

/// One-shot convenience wrapper around ElasticSolver::solve.
ElasticSolution solve_elastic(const Grid& grid, const Medium& medium, const CrackState& crack,
                              std::span<const double> datum,
                              std::span<const double> datum_rate = {});

/// Node,value CSV of a solution.
std::string solution_csv(const ElasticSolution& sol);

}  // namespace hfrac
