#include "hfrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

Face parse_face(const std::string& name) {
  if (name == "left") return Face::left;
  if (name == "right") return Face::right;
  if (name == "bottom") return Face::bottom;
  if (name == "top") return Face::top;
  throw ConfigError("unknown boundary face '" + name + "'");
}

std::string_view face_name(Face f) {
  switch (f) {
    case Face::left: return "left";
    case Face::right: return "right";
    case Face::bottom: return "bottom";
    case Face::top: return "top";
  }
  return "?";
}

int Grid::num_cells() const {
  return dimension_ == 1 ? counts_[0] - 1 : (counts_[0] - 1) * (counts_[1] - 1);
}

std::array<double, 2> Grid::node_position(NodeId n) const {
  return {origin_[0] + node_i(n) * h_, dimension_ == 1 ? 0.0 : origin_[1] + node_j(n) * h_};
}

bool Grid::on_boundary(NodeId n) const {
  const int i = node_i(n);
  const int j = node_j(n);
  if (i == 0 || i == counts_[0] - 1) return true;
  return dimension_ == 2 && (j == 0 || j == counts_[1] - 1);
}

std::array<double, 2> Grid::cell_center(int c) const {
  if (dimension_ == 1) return {origin_[0] + (c + 0.5) * h_, 0.0};
  const int i = c % (counts_[0] - 1);
  const int j = c / (counts_[0] - 1);
  return {origin_[0] + (i + 0.5) * h_, origin_[1] + (j + 0.5) * h_};
}

std::array<int, 2> Grid::edge_cells(EdgeId e) const {
  if (dimension_ == 1) return {e, -1};
  const int cx = counts_[0] - 1;
  const int cy = counts_[1] - 1;
  if (e < num_x_edges_) {
    const int i = e % cx;
    const int j = e / cx;
    return {j > 0 ? (j - 1) * cx + i : -1, j < cy ? j * cx + i : -1};
  }
  const int k = e - num_x_edges_;
  const int i = k % counts_[0];
  const int j = k / counts_[0];
  return {i > 0 ? j * cx + i - 1 : -1, i < cx ? j * cx + i : -1};
}

std::array<double, 2> Grid::edge_midpoint(EdgeId e) const {
  const auto a = node_position(edge_lo_[e]);
  const auto b = node_position(edge_hi_[e]);
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

int Grid::normal_axis(EdgeId id) const {
  return id < num_edges() ? edge_axis_[id] : ghost_axis_[id - num_edges()];
}

std::array<double, 2> Grid::site_position(EdgeId id) const {
  return id < num_edges() ? edge_midpoint(id) : node_position(ghost_node(id));
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << dimension_ << "D grid " << counts_[0];
  if (dimension_ == 2) os << "x" << counts_[1];
  os << " nodes, h=" << h_ << ", " << num_edges() << " edges, " << num_dirichlet()
     << " Dirichlet nodes";
  return os.str();
}

namespace {

bool node_on_face(const Grid& g, NodeId n, Face f) {
  const int i = g.node_i(n);
  const int j = g.node_j(n);
  switch (f) {
    case Face::left: return i == 0;
    case Face::right: return i == g.nx() - 1;
    case Face::bottom: return g.dimension() == 2 && j == 0;
    case Face::top: return g.dimension() == 2 && j == g.ny() - 1;
  }
  return false;
}

int face_axis(Face f) { return (f == Face::left || f == Face::right) ? 0 : 1; }

// Length of the part of the node's dual cell boundary lying on face f.
double face_share(const Grid& g, NodeId n, Face f) {
  if (g.dimension() == 1) return 1.0;
  const bool along_y = face_axis(f) == 0;
  const int k = along_y ? g.node_j(n) : g.node_i(n);
  const int last = along_y ? g.ny() - 1 : g.nx() - 1;
  return (k == 0 || k == last) ? 0.5 * g.h() : g.h();
}

}  // namespace

Grid build_grid(int dimension, std::array<double, 2> extent, std::array<int, 2> counts,
                const DirichletSpec& dirichlet, std::array<double, 2> origin) {
  if (dimension != 1 && dimension != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (dimension == 1) {
    counts[1] = 1;
    extent[1] = 0.0;
    origin[1] = 0.0;
  }
  for (int a = 0; a < dimension; ++a) {
    if (counts[a] < 2) throw ConfigError("grid node count must be >= 2 on every axis");
    if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) {
      throw ConfigError("grid extent must be positive and finite");
    }
  }
  Grid g;
  g.dimension_ = dimension;
  g.origin_ = origin;
  g.extent_ = extent;
  g.counts_ = counts;
  g.h_ = extent[0] / (counts[0] - 1);
  if (dimension == 2) {
    const double hy = extent[1] / (counts[1] - 1);
    if (std::abs(hy - g.h_) > 1e-12 * g.h_) {
      throw ConfigError("2D grids need square cells: extent/(count-1) must agree on both axes");
    }
  }

  const int nx = counts[0];
  const int ny = counts[1];
  g.num_x_edges_ = (nx - 1) * ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      g.edge_lo_.push_back(g.node(i, j));
      g.edge_hi_.push_back(g.node(i + 1, j));
      g.edge_axis_.push_back(0);
    }
  }
  if (dimension == 2) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        g.edge_lo_.push_back(g.node(i, j));
        g.edge_hi_.push_back(g.node(i, j + 1));
        g.edge_axis_.push_back(1);
      }
    }
  }
  for (std::size_t e = 0; e < g.edge_lo_.size(); ++e) {
    double m = 1.0;
    if (dimension == 2) {
      const NodeId a = g.edge_lo_[e];
      const bool boundary =
          g.edge_axis_[e] == 0 ? (g.node_j(a) == 0 || g.node_j(a) == ny - 1)
                               : (g.node_i(a) == 0 || g.node_i(a) == nx - 1);
      m = boundary ? 0.5 * g.h_ : g.h_;
    }
    g.measure_.push_back(m);
  }

  std::vector<NodeId> nodes;
  for (Face f : dirichlet.faces) {
    if (dimension == 1 && (f == Face::bottom || f == Face::top)) {
      throw ConfigError("1D grids only have left/right faces");
    }
    for (NodeId n = 0; n < g.num_nodes(); ++n) {
      if (node_on_face(g, n, f)) nodes.push_back(n);
    }
  }
  for (NodeId n : dirichlet.nodes) {
    if (n < 0 || n >= g.num_nodes()) throw ConfigError("Dirichlet node index out of range");
    if (!g.on_boundary(n)) {
      throw ConfigError("Dirichlet node " + std::to_string(n) + " is not a boundary node");
    }
    nodes.push_back(n);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  g.dirichlet_ = nodes;
  g.ghost_of_node_.assign(g.num_nodes(), -1);

  const std::array<Face, 4> all_faces{Face::left, Face::right, Face::bottom, Face::top};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeId n = nodes[k];
    g.ghost_of_node_[n] = static_cast<int>(k);
    double m = 0.0;
    int axis = -1;
    // Faces listed in `dirichlet` take precedence; explicit nodes use every face
    // they lie on, but only the first one counts towards the measure.
    for (Face f : dirichlet.faces) {
      if (node_on_face(g, n, f)) {
        m += face_share(g, n, f);
        if (axis < 0) axis = face_axis(f);
      }
    }
    if (axis < 0) {
      for (Face f : all_faces) {
        if (node_on_face(g, n, f)) {
          m = face_share(g, n, f);
          axis = face_axis(f);
          break;
        }
      }
    }
    g.ghost_axis_.push_back(axis);
    g.measure_.push_back(m);
  }
  return g;
}

}  // namespace hfrac
