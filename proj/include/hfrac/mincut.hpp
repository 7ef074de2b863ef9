#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hfrac/grid.hpp"
#include "hfrac/maxflow.hpp"
#include "hfrac/medium.hpp"

namespace hfrac {

/// Two-terminal cut problem on an undirected weighted graph.
struct CutProblem {
  int num_nodes = 0;
  std::vector<int> lo;
  std::vector<int> hi;
  /// Nonnegative; discounted edges carry 0.
  std::vector<double> weight;
  std::vector<int> sources;
  std::vector<int> sinks;
  /// Edges with an endpoint outside the graph, attached to a terminal:
  /// node, weight, and whether the far side is the source.
  struct Seam {
    int node;
    double weight;
    bool to_source;
  };
  std::vector<Seam> seams;
};

struct CutResult {
  /// Sum of real weights over the cut edges (seams included).
  double cost = 0.0;
  /// Indices into CutProblem::lo/hi, ascending.
  std::vector<int> cut_edges;
  std::vector<int> cut_seams;
  std::vector<std::uint8_t> source_side;
  /// Integer problem: weights scaled to round(w / w_max * 2^20).
  double scale = 0.0;
  MaxFlow::Capacity flow = 0;
  MaxFlow::Capacity cut_capacity = 0;
  bool certified = false;
  /// Empty source or sink set: cost 0 by convention.
  bool degenerate = false;
};

inline constexpr double kCutScaleBits = 1048576.0;  // 2^20

/// Minimum cut with a max-flow duality certificate. Throws ConfigError for
/// negative/non-finite weights or overlapping terminals, NumericalError when
/// the certificate fails.
CutResult min_cut(const CutProblem& problem);

/// Square window of lattice nodes centred on the node nearest `center`.
struct Window {
  int i0 = 0, j0 = 0;
  int radius = 0;  // in nodes
  int ic() const { return i0 + radius; }
  int jc() const { return j0 + radius; }
  int width() const { return 2 * radius + 1; }
};

/// Throws ConfigError when rho < 4h, for 1D grids, or when the window does
/// not fit inside the grid.
Window make_window(const Grid& grid, std::array<double, 2> center, double rho);

/// Cut problem on a window: weights kappa * measure, halved on the window
/// boundary, zero on discounted edges. Sources are the perimeter nodes on the
/// positive side of the centre line with normal nu (axis 0 or 1), sinks on
/// the negative side. `discount` is indexed by lattice edge (may be empty).
CutProblem window_cut_problem(const Grid& grid, const Medium& medium,
                              const std::vector<std::uint8_t>& discount, const Window& w,
                              int nu_axis);
/// Local window node -> grid node.
NodeId window_node(const Grid& grid, const Window& w, int local);

/// Sum of kappa * measure over jump edges of a two-valued field not in the
/// discount, restricted to edges inside the window (window-boundary edges
/// count half). Throws ConfigError if u takes more than two values.
double surface_functional(const Grid& grid, const Medium& medium,
                          const std::vector<double>& u,
                          const std::vector<std::uint8_t>& discount, const Window& w);

/// Named crack-sequence generators K_n on a 2D grid.
struct SequenceDescriptor {
  enum class Kind { teeth, fraction, fixed_line, edge_list };
  Kind kind = Kind::fixed_line;
  /// fraction: covered length fraction.
  double a = 0.5;
  /// fixed_line / fraction: height of the horizontal line.
  double line_y = 0.0;
  /// edge_list: explicit lattice edge ids (independent of n).
  std::vector<EdgeId> edges;

  std::string name() const;
};

SequenceDescriptor parse_sequence(const std::string& text);

/// Lattice edge mask of K_n.
///  teeth(n):     vertical segments {i/n} x [-1/n, 1/n], i = -n..n
///  fraction(a,n): horizontal pieces [i/n, (i+a)/n) x {line_y}
///  fixed-line:   the full line y = line_y
std::vector<std::uint8_t> generate_crack(const SequenceDescriptor& seq, const Grid& grid, int n);

/// Unweighted lattice measure of an edge mask.
double crack_measure(const Grid& grid, const std::vector<std::uint8_t>& mask);
/// kappa-weighted measure of an edge mask.
double crack_weighted_measure(const Grid& grid, const Medium& medium,
                              const std::vector<std::uint8_t>& mask);

struct SigmaProbeReport {
  std::string generator;
  int n = 0;
  std::array<double, 2> center{0.0, 0.0};
  double rho = 0.0;
  int nu_axis = 1;
  /// min cut cost / (2 rho)
  double density = 0.0;
  double cost = 0.0;
  bool certified = false;
};

struct SigmaProbeRequest {
  SequenceDescriptor sequence;
  std::vector<std::array<double, 2>> centers;
  std::vector<double> radii;
  std::vector<int> nu_axes{1};
  /// Explicit n values; empty selects the diagonal n(rho) = ceil(1 / rho^2).
  std::vector<int> ns;
};

std::vector<SigmaProbeReport> sigma_probe(const Grid& grid, const Medium& medium,
                                          const SigmaProbeRequest& request, int jobs = 1);

inline int diagonal_n(double rho) {
  const double v = 1.0 / (rho * rho);
  const double r = std::round(v);
  return static_cast<int>(std::abs(v - r) < 1e-9 * v ? r : std::ceil(v));
}

/// tau = 0.05 alpha.
inline double sigma_threshold(double alpha) { return 0.05 * alpha; }

struct SigmaClassification {
  std::array<double, 2> center{0.0, 0.0};
  int nu_axis = 1;
  /// Density at the finest (largest n, then smallest rho) probe.
  double density = 0.0;
  bool in_limit = false;
};

/// Groups reports by (center, nu) and marks a point as in the sigma-limit
/// when the density at the largest n, smallest rho is <= tau.
std::vector<SigmaClassification> classify_sigma(const std::vector<SigmaProbeReport>& reports,
                                                double alpha);

std::string sigma_probe_csv(const std::vector<SigmaProbeReport>& reports);

}  // namespace hfrac
