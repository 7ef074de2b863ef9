#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfrac/datum.hpp"
#include "hfrac/elastic.hpp"
#include "hfrac/fields.hpp"
#include "hfrac/grid.hpp"
#include "hfrac/medium.hpp"

namespace hfrac {

/// Admissible crack families for the incremental minimisation.
///  exhaustive1d: K plus at most two new sites, bulk energy in closed form.
///  generic1d:    K plus at most one new site, bulk energy from the solver.
///  exhaustive2d: K plus every subset of a configured list of <= 14 sites.
///  path2d:       K extended along an x-monotone dual path that starts on the
///                left side; per (length, end row) the cheapest extension.
enum class Backend { exhaustive1d, generic1d, exhaustive2d, path2d };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend b);

struct EvolutionOptions {
  Backend backend = Backend::exhaustive1d;
  /// exhaustive2d: candidate crack sites; empty means all sites (if <= 14).
  std::vector<EdgeId> candidates;
  /// Total energies within this relative distance are tied.
  double tie_tolerance = 1e-11;
  bool check_invariants = true;
  /// Run verify_unilateral_minimality after every step.
  bool verify_each_step = false;
  int verify_budget = 256;
  std::uint64_t seed = 0;
  int jobs = 1;
  ConvexSolveOptions solver;
};

struct StepState {
  CrackState crack;
  ElasticSolution solution;
  /// path2d: row of the crossed vertical edge in each column so far.
  std::vector<int> path_rows;
};

struct StepRecord {
  double t = 0.0;
  StepState state;
  EnergyBreakdown energy;
  double theta = 0.0;
  double cumulative_work = 0.0;
};

struct EvolutionTrace {
  std::string backend;
  std::string family;
  double delta = 0.0;
  std::vector<StepRecord> steps;
};

struct MinimalityReport {
  bool exhaustive = false;
  std::size_t challenges = 0;
  /// min over challenges H of E_b(v_H) + surface(H \ K) - E_b(u)
  double worst_margin = 0.0;
  std::size_t violations = 0;
  /// Added sites of the worst challenge.
  std::vector<EdgeId> witness;
  double witness_bulk = 0.0;
  double witness_surface = 0.0;
  bool ok() const { return violations == 0; }
  std::string describe() const;
};

struct EnergyBalance {
  std::vector<double> residual;
  double max_abs = 0.0;
  double delta = 0.0;
};

/// Discretised-in-time quasistatic evolution on a fixed grid and medium.
class Evolution {
 public:
  /// Throws ConfigError for a backend that does not fit the grid or p <= 1.
  Evolution(const Grid& grid, const Medium& medium, const BoundaryDatum& datum,
            EvolutionOptions options);

  const ElasticSolver& solver() const { return solver_; }
  const EvolutionOptions& options() const { return options_; }
  std::string family_description() const;

  /// Empty state (no crack) to start from.
  StepState initial_state() const;
  /// Minimises bulk + surface energy at step i over the backend family of
  /// cracks containing prev.crack.
  StepState incremental_step(const StepState& prev, std::size_t i) const;
  EvolutionTrace run() const;

  /// Checks E_b(u) <= E_b(v_H) + surface(H \ K) for challenges H containing
  /// K from the backend family: all of them when there are at most 2^14,
  /// otherwise `budget` seeded samples.
  MinimalityReport verify_unilateral_minimality(const StepState& state, std::size_t i,
                                                int budget, std::uint64_t seed) const;

  /// Throws InvariantViolation on irreversibility, admissibility, sup-norm,
  /// surface-monotonicity or crack-enlargement failures between two steps.
  void check_step_invariants(const StepState* prev, const StepState& cur, std::size_t i) const;

 private:
  struct Candidate {
    std::vector<EdgeId> added;
    std::vector<int> path_rows;
    /// Surface energy of the added sites (a lower bound on the gain).
    double added_surface = 0.0;
  };
  std::vector<Candidate> candidates(const StepState& prev, std::size_t i) const;
  std::vector<Candidate> path_candidates(const StepState& prev, bool random, int budget,
                                         std::uint64_t seed) const;
  double closed_form_bulk(const CrackState& crack, const std::vector<double>& datum) const;
  double candidate_bulk(const CrackState& crack, const std::vector<double>& datum) const;

  const Grid* grid_;
  const Medium* medium_;
  const BoundaryDatum* datum_;
  EvolutionOptions options_;
  ElasticSolver solver_;
  std::vector<EdgeId> exhaustive_sites_;
};

EnergyBalance energy_balance_audit(const EvolutionTrace& trace);

/// step,t,bulk,surface,total,theta,cumulative_work,n_cracked_edges
std::string trace_csv(const EvolutionTrace& trace);
/// step,edge: sites added at each step.
std::string crack_log_csv(const EvolutionTrace& trace);

}  // namespace hfrac
