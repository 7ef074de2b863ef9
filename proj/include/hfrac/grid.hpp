#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hfrac {

using NodeId = int;
/// Index of a crack site: lattice edges occupy [0, num_edges()), Dirichlet
/// ghost edges (one per boundary datum node) follow.
using EdgeId = int;

enum class Face { left, right, bottom, top };

Face parse_face(const std::string& name);
std::string_view face_name(Face f);

struct DirichletSpec {
  std::vector<Face> faces;
  std::vector<NodeId> nodes;
};

struct Edge {
  NodeId lo;
  NodeId hi;
  /// Direction of the edge; also the axis of the normal of its dual face.
  int axis;
};

/// Uniform lattice on a 1D interval or a 2D rectangle with square cells.
///
/// Nodes are numbered row-major (i fastest). Edges along x come first,
/// row-major with nx-1 per row, then edges along y with nx per row.
class Grid {
 public:
  int dimension() const { return dimension_; }
  int nx() const { return counts_[0]; }
  int ny() const { return counts_[1]; }
  double h() const { return h_; }
  std::array<double, 2> origin() const { return origin_; }
  std::array<double, 2> extent() const { return extent_; }

  int num_nodes() const { return counts_[0] * counts_[1]; }
  int num_cells() const;
  int num_edges() const { return static_cast<int>(edge_lo_.size()); }
  int num_dirichlet() const { return static_cast<int>(dirichlet_.size()); }
  int num_crack_ids() const { return num_edges() + num_dirichlet(); }

  NodeId node(int i, int j = 0) const { return j * counts_[0] + i; }
  int node_i(NodeId n) const { return n % counts_[0]; }
  int node_j(NodeId n) const { return n / counts_[0]; }
  std::array<double, 2> node_position(NodeId n) const;
  bool on_boundary(NodeId n) const;

  std::array<double, 2> cell_center(int c) const;
  /// Cells adjacent to an edge; -1 where the edge lies on the boundary.
  std::array<int, 2> edge_cells(EdgeId e) const;

  EdgeId x_edge(int i, int j) const { return j * (counts_[0] - 1) + i; }
  EdgeId y_edge(int i, int j) const { return num_x_edges_ + j * counts_[0] + i; }
  int num_x_edges() const { return num_x_edges_; }
  Edge edge(EdgeId e) const { return {edge_lo_[e], edge_hi_[e], edge_axis_[e]}; }
  std::span<const int> edge_lo() const { return edge_lo_; }
  std::span<const int> edge_hi() const { return edge_hi_; }
  std::array<double, 2> edge_midpoint(EdgeId e) const;

  /// Surface measure of a crack site: h (h/2 for edges lying on the boundary)
  /// in 2D, 1 in 1D. Ghost edges get the length of the node's dual face on
  /// the Dirichlet boundary.
  double measure(EdgeId id) const { return measure_[id]; }
  std::span<const double> measures() const { return measure_; }
  /// Normal axis of any crack site (ghosts: outward normal of their face).
  int normal_axis(EdgeId id) const;
  std::array<double, 2> site_position(EdgeId id) const;

  std::span<const NodeId> dirichlet_nodes() const { return dirichlet_; }
  int ghost_index(NodeId n) const { return ghost_of_node_[n]; }
  bool is_ghost(EdgeId id) const { return id >= num_edges(); }
  EdgeId ghost_edge(int k) const { return num_edges() + k; }
  NodeId ghost_node(EdgeId id) const { return dirichlet_[id - num_edges()]; }

  std::string describe() const;

  friend Grid build_grid(int dimension, std::array<double, 2> extent,
                         std::array<int, 2> counts, const DirichletSpec& dirichlet,
                         std::array<double, 2> origin);

 private:
  int dimension_ = 1;
  std::array<double, 2> origin_{0.0, 0.0};
  std::array<double, 2> extent_{1.0, 0.0};
  std::array<int, 2> counts_{2, 1};
  double h_ = 1.0;
  int num_x_edges_ = 0;
  std::vector<int> edge_lo_, edge_hi_, edge_axis_;
  std::vector<double> measure_;
  std::vector<NodeId> dirichlet_;
  std::vector<int> ghost_axis_;
  std::vector<int> ghost_of_node_;
};

/// Throws ConfigError on counts < 2, non-positive extents, non-square 2D
/// cells, or Dirichlet nodes off the boundary.
Grid build_grid(int dimension, std::array<double, 2> extent, std::array<int, 2> counts,
                const DirichletSpec& dirichlet, std::array<double, 2> origin = {0.0, 0.0});

}  // namespace hfrac
