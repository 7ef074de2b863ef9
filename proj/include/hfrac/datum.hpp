#pragma once

#include <span>
#include <vector>

namespace hfrac {

/// Boundary displacement psi(t_i) on the Dirichlet nodes of a grid.
///
/// Either an analytic ramp psi(t) = profile * t, or tabulated per-step node
/// values with a finite-difference rate.
class BoundaryDatum {
 public:
  static BoundaryDatum ramp(std::vector<double> times, std::vector<double> profile,
                            double bound = -1.0);
  static BoundaryDatum tabulated(std::vector<double> times,
                                 std::vector<std::vector<double>> values, double bound = -1.0);
  /// 0, dt, 2 dt, ..., t_end (t_end rounded to a whole number of steps).
  static std::vector<double> uniform_times(double t_end, double dt);

  std::span<const double> times() const { return times_; }
  std::size_t num_steps() const { return times_.size(); }
  std::size_t num_nodes() const { return num_nodes_; }
  bool is_ramp() const { return values_.empty(); }

  std::vector<double> values(std::size_t step) const;
  /// d psi / dt at the step (backward difference; forward at step 0).
  std::vector<double> rate(std::size_t step) const;
  double sup_norm(std::size_t step) const;
  /// Declared L-infinity bound C.
  double bound() const { return bound_; }
  double max_step() const;

 private:
  void validate();

  std::vector<double> times_;
  std::vector<double> profile_;
  std::vector<std::vector<double>> values_;
  std::size_t num_nodes_ = 0;
  double bound_ = -1.0;
};

}  // namespace hfrac
