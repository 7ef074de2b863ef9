#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hfrac {

/// Convex lattice energy
///
///   E(u) = sum_t  w_t |(D_{t,0}(u), D_{t,1}(u))|^p,
///   D_k(u) = u[hi_k] - u[lo_k] + offset_k,
///
/// where each term references one or two differences. Differences can be
/// disabled (a cracked edge); a disabled difference contributes zero to every
/// term that uses it. For p = 2 terms may carry a separate weight per
/// component (axis-anisotropic media); otherwise both weights must agree.
struct LatticeEnergy {
  int num_nodes = 0;
  double p = 2.0;
  std::vector<int> lo;
  std::vector<int> hi;
  /// Empty means all offsets are zero.
  std::vector<double> offset;
  /// Difference indices per term; -1 marks an absent component.
  std::vector<std::array<int, 2>> term_diff;
  std::vector<std::array<double, 2>> term_weight;

  std::size_t num_differences() const { return lo.size(); }

  /// p = 2 only: per-difference coefficient c_k with E = sum_k c_k D_k^2.
  std::vector<double> conductance(std::span<const std::uint8_t> disabled) const;

  void differences(std::span<const double> u, std::span<double> out) const;
  double evaluate(std::span<const double> u, std::span<const std::uint8_t> disabled) const;
  /// dE/du for every node.
  void gradient(std::span<const double> u, std::span<const std::uint8_t> disabled,
                std::span<double> out) const;
  /// Directional derivative E'(u)[w] with w's differences taken without offsets.
  double directional_derivative(std::span<const double> u, std::span<const double> w,
                                std::span<const std::uint8_t> disabled) const;
};

struct ConvexSolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

struct ConvexSolveResult {
  std::vector<double> u;
  double energy = 0.0;
  int iterations = 0;
  /// ||grad_free||_2 / (1 + ||grad_free at start||_2) at exit.
  double residual = 0.0;
};

/// Minimises E over nodes with fixed[n] == 0; fixed nodes keep their values
/// from `u0`. Every free node must be connected to a fixed node through
/// enabled differences. p = 2 is one sparse SPD solve; other p > 1 use damped
/// Newton started from the p = 2 solution. Throws NumericalError when the
/// linear algebra fails or Newton does not reach the tolerance.
ConvexSolveResult minimize_lattice_energy(const LatticeEnergy& energy,
                                          std::span<const std::uint8_t> disabled,
                                          std::span<const std::uint8_t> fixed,
                                          std::vector<double> u0,
                                          const ConvexSolveOptions& options = {});

/// Disjoint-set forest over node ids.
class UnionFind {
 public:
  explicit UnionFind(int n);
  int find(int a);
  void unite(int a, int b);

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

}  // namespace hfrac
