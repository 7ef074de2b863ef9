#include "hfrac/mincut.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"
#include "hfrac/parallel.hpp"

namespace hfrac {

namespace {

void check_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw ConfigError("cut weights must be finite and nonnegative");
  }
}

}  // namespace

CutResult min_cut(const CutProblem& pb) {
  const std::size_t m = pb.lo.size();
  if (pb.hi.size() != m || pb.weight.size() != m) {
    throw ConfigError("cut problem edge arrays differ in length");
  }
  double w_max = 0.0;
  for (double w : pb.weight) {
    check_weight(w);
    w_max = std::max(w_max, w);
  }
  for (const auto& s : pb.seams) {
    check_weight(s.weight);
    w_max = std::max(w_max, s.weight);
  }
  std::vector<std::int8_t> terminal(pb.num_nodes, 0);
  for (int s : pb.sources) {
    if (s < 0 || s >= pb.num_nodes) throw ConfigError("source node out of range");
    terminal[s] = 1;
  }
  for (int t : pb.sinks) {
    if (t < 0 || t >= pb.num_nodes) throw ConfigError("sink node out of range");
    if (terminal[t] == 1) throw ConfigError("node " + std::to_string(t) + " is both source and sink");
    terminal[t] = -1;
  }

  CutResult r;
  const bool has_source = !pb.sources.empty() ||
      std::any_of(pb.seams.begin(), pb.seams.end(), [](const auto& s) { return s.to_source; });
  const bool has_sink = !pb.sinks.empty() ||
      std::any_of(pb.seams.begin(), pb.seams.end(), [](const auto& s) { return !s.to_source; });
  if (!has_source || !has_sink) {
    r.degenerate = true;
    r.certified = true;
    r.source_side.assign(pb.num_nodes, has_source ? 1 : 0);
    return r;
  }

  r.scale = w_max > 0.0 ? kCutScaleBits / w_max : 0.0;
  auto quantize = [&](double w) { return static_cast<MaxFlow::Capacity>(std::llround(w * r.scale)); };
  MaxFlow::Capacity total = 1;
  std::vector<MaxFlow::Capacity> wi(m);
  for (std::size_t e = 0; e < m; ++e) total += (wi[e] = quantize(pb.weight[e]));
  for (const auto& s : pb.seams) total += quantize(s.weight);

  MaxFlow mf(pb.num_nodes);
  for (std::size_t e = 0; e < m; ++e) {
    if (wi[e] > 0) mf.add_edge(pb.lo[e], pb.hi[e], wi[e], wi[e]);
  }
  for (const auto& s : pb.seams) {
    const auto c = quantize(s.weight);
    mf.add_terminal(s.node, s.to_source ? c : 0, s.to_source ? 0 : c);
  }
  for (int s : pb.sources) mf.add_terminal(s, total, 0);
  for (int t : pb.sinks) mf.add_terminal(t, 0, total);

  r.flow = mf.solve();
  const auto cert = mf.certify();
  r.cut_capacity = cert.cut_capacity;
  r.certified = cert.optimal() && r.flow < total;
  if (!r.certified) {
    std::ostringstream d;
    d << "max-flow certificate failed\n"
      << "capacity_ok=" << cert.capacity_ok << "\nconservation_ok=" << cert.conservation_ok
      << "\nflow=" << cert.flow_value << "\ncut_capacity=" << cert.cut_capacity << "\n";
    throw NumericalError("min-cut duality certificate failed", d.str());
  }
  r.source_side = mf.source_side();
  for (std::size_t e = 0; e < m; ++e) {
    if (r.source_side[pb.lo[e]] != r.source_side[pb.hi[e]]) {
      r.cut_edges.push_back(static_cast<int>(e));
      r.cost += pb.weight[e];
    }
  }
  for (std::size_t k = 0; k < pb.seams.size(); ++k) {
    const auto& s = pb.seams[k];
    if ((r.source_side[s.node] != 0) != s.to_source) {
      r.cut_seams.push_back(static_cast<int>(k));
      r.cost += s.weight;
    }
  }
  return r;
}

Window make_window(const Grid& grid, std::array<double, 2> center, double rho) {
  if (grid.dimension() != 2) throw ConfigError("cut windows need a 2D grid");
  const double h = grid.h();
  if (!(rho >= 4.0 * h * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "probe radius rho=" << rho << " violates the resolution constraint rho >= 4h = "
       << 4.0 * h;
    throw ConfigError(os.str());
  }
  Window w;
  w.radius = static_cast<int>(std::lround(rho / h));
  const auto o = grid.origin();
  const int ic = static_cast<int>(std::lround((center[0] - o[0]) / h));
  const int jc = static_cast<int>(std::lround((center[1] - o[1]) / h));
  w.i0 = ic - w.radius;
  w.j0 = jc - w.radius;
  if (w.i0 < 0 || w.j0 < 0 || ic + w.radius > grid.nx() - 1 || jc + w.radius > grid.ny() - 1) {
    std::ostringstream os;
    os << "probe window at (" << center[0] << ", " << center[1] << ") with rho=" << rho
       << " does not fit inside the grid";
    throw ConfigError(os.str());
  }
  return w;
}

NodeId window_node(const Grid& grid, const Window& w, int local) {
  return grid.node(w.i0 + local % w.width(), w.j0 + local / w.width());
}

namespace {

struct WindowEdge {
  EdgeId edge;
  int lo, hi;
  double measure;
};

// Lattice edges with both ends in the window, in grid edge order.
std::vector<WindowEdge> window_edges(const Grid& grid, const Window& w) {
  std::vector<WindowEdge> out;
  const int W = w.width();
  const double h = grid.h();
  for (int j = 0; j < W; ++j) {
    for (int i = 0; i + 1 < W; ++i) {
      const bool rim = j == 0 || j == W - 1;
      out.push_back({grid.x_edge(w.i0 + i, w.j0 + j), j * W + i, j * W + i + 1, rim ? 0.5 * h : h});
    }
  }
  for (int j = 0; j + 1 < W; ++j) {
    for (int i = 0; i < W; ++i) {
      const bool rim = i == 0 || i == W - 1;
      out.push_back({grid.y_edge(w.i0 + i, w.j0 + j), j * W + i, (j + 1) * W + i, rim ? 0.5 * h : h});
    }
  }
  return out;
}

}  // namespace

CutProblem window_cut_problem(const Grid& grid, const Medium& medium,
                              const std::vector<std::uint8_t>& discount, const Window& w,
                              int nu_axis) {
  if (nu_axis != 0 && nu_axis != 1) throw ConfigError("probe direction must be e1 or e2");
  if (!discount.empty() && discount.size() < static_cast<std::size_t>(grid.num_edges())) {
    throw ConfigError("discount mask does not match the grid");
  }
  const int W = w.width();
  CutProblem pb;
  pb.num_nodes = W * W;
  for (const auto& e : window_edges(grid, w)) {
    pb.lo.push_back(e.lo);
    pb.hi.push_back(e.hi);
    const bool off = !discount.empty() && discount[e.edge];
    pb.weight.push_back(off ? 0.0 : medium.toughness()[e.edge] * e.measure);
  }
  const int c = w.radius;
  for (int l = 0; l < pb.num_nodes; ++l) {
    const int i = l % W;
    const int j = l / W;
    if (i != 0 && j != 0 && i != W - 1 && j != W - 1) continue;
    const int s = nu_axis == 1 ? j - c : i - c;
    if (s > 0) pb.sources.push_back(l);
    if (s < 0) pb.sinks.push_back(l);
  }
  return pb;
}

double surface_functional(const Grid& grid, const Medium& medium, const std::vector<double>& u,
                          const std::vector<std::uint8_t>& discount, const Window& w) {
  if (u.size() != static_cast<std::size_t>(grid.num_nodes())) {
    throw ConfigError("field size does not match the grid");
  }
  std::vector<double> distinct;
  const int W = w.width();
  for (int l = 0; l < W * W; ++l) {
    const double v = u[window_node(grid, w, l)];
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) {
      distinct.push_back(v);
      if (distinct.size() > 2) throw ConfigError("surface functional needs a two-valued field");
    }
  }
  double total = 0.0;
  for (const auto& e : window_edges(grid, w)) {
    const auto ed = grid.edge(e.edge);
    if (u[ed.lo] == u[ed.hi]) continue;
    if (!discount.empty() && discount[e.edge]) continue;
    total += medium.toughness()[e.edge] * e.measure;
  }
  return total;
}

std::string SequenceDescriptor::name() const {
  switch (kind) {
    case Kind::teeth: return "teeth";
    case Kind::fraction: {
      std::ostringstream os;
      os << "fraction(" << a << ")";
      return os.str();
    }
    case Kind::fixed_line: return "fixed-line";
    case Kind::edge_list: return "edge-list";
  }
  return "?";
}

SequenceDescriptor parse_sequence(const std::string& text) {
  SequenceDescriptor s;
  if (text == "teeth") {
    s.kind = SequenceDescriptor::Kind::teeth;
  } else if (text == "fixed-line") {
    s.kind = SequenceDescriptor::Kind::fixed_line;
  } else if (text.rfind("fraction(", 0) == 0 && text.back() == ')') {
    s.kind = SequenceDescriptor::Kind::fraction;
    s.a = parse_real(text.substr(9, text.size() - 10), "fraction generator");
    if (!(s.a > 0.0 && s.a <= 1.0)) throw ConfigError("fraction generator needs 0 < a <= 1");
  } else {
    throw ConfigError("unknown crack sequence generator '" + text + "'");
  }
  return s;
}

std::vector<std::uint8_t> generate_crack(const SequenceDescriptor& seq, const Grid& grid, int n) {
  if (grid.dimension() != 2) throw ConfigError("crack sequences need a 2D grid");
  if (n < 1 && seq.kind != SequenceDescriptor::Kind::edge_list &&
      seq.kind != SequenceDescriptor::Kind::fixed_line) {
    throw ConfigError("sequence index n must be >= 1");
  }
  std::vector<std::uint8_t> mask(grid.num_edges(), 0);
  const double h = grid.h();
  const auto o = grid.origin();
  const double tol = 1e-9;
  // Index k of the lattice interval with x_k <= c < x_{k+1}, or -1.
  auto interval = [&](double c, int axis, int count) {
    const double s = (c - o[axis]) / h;
    const int k = static_cast<int>(std::floor(s + tol));
    return (k >= 0 && k + 1 < count) ? k : -1;
  };
  switch (seq.kind) {
    case SequenceDescriptor::Kind::teeth: {
      const double half = 1.0 / n;
      for (int i = -n; i <= n; ++i) {
        const int k = interval(static_cast<double>(i) / n, 0, grid.nx());
        if (k < 0) continue;
        for (int j = 0; j < grid.ny(); ++j) {
          const double y = o[1] + j * h;
          if (std::abs(y) <= half + tol * h) mask[grid.x_edge(k, j)] = 1;
        }
      }
      break;
    }
    case SequenceDescriptor::Kind::fraction:
    case SequenceDescriptor::Kind::fixed_line: {
      if (seq.kind == SequenceDescriptor::Kind::fraction) {
        const double covered = seq.a / n;
        const double gap = (1.0 - seq.a) / n;
        if (covered < h * (1.0 - tol) || (gap > 0.0 && gap < h * (1.0 - tol))) {
          std::ostringstream os;
          os << seq.name() << " at n=" << n << " is not resolved by the grid: both a/n and (1-a)/n"
             << " must be at least h = " << h;
          throw ConfigError(os.str());
        }
      }
      const int k = interval(seq.line_y, 1, grid.ny());
      if (k < 0) break;
      for (int i = 0; i < grid.nx(); ++i) {
        bool on = true;
        if (seq.kind == SequenceDescriptor::Kind::fraction) {
          const double s = (o[0] + i * h) * n;
          const double f = std::max(0.0, s - std::floor(s + tol));
          on = f < seq.a - tol;
        }
        if (on) mask[grid.y_edge(i, k)] = 1;
      }
      break;
    }
    case SequenceDescriptor::Kind::edge_list:
      for (EdgeId e : seq.edges) {
        if (e < 0 || e >= grid.num_edges()) {
          throw ConfigError("edge list entry " + std::to_string(e) + " out of range");
        }
        mask[e] = 1;
      }
      break;
  }
  return mask;
}

double crack_measure(const Grid& grid, const std::vector<std::uint8_t>& mask) {
  double m = 0.0;
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (mask[e]) m += grid.measure(static_cast<EdgeId>(e));
  }
  return m;
}

double crack_weighted_measure(const Grid& grid, const Medium& medium,
                              const std::vector<std::uint8_t>& mask) {
  double m = 0.0;
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (mask[e]) m += medium.toughness()[e] * grid.measure(static_cast<EdgeId>(e));
  }
  return m;
}

std::vector<SigmaProbeReport> sigma_probe(const Grid& grid, const Medium& medium,
                                          const SigmaProbeRequest& rq, int jobs) {
  struct Task {
    std::size_t center;
    double rho;
    int nu;
    int n;
  };
  std::vector<Task> tasks;
  std::vector<int> distinct_n;
  for (std::size_t c = 0; c < rq.centers.size(); ++c) {
    for (double rho : rq.radii) {
      make_window(grid, rq.centers[c], rho);  // validate up front
      const std::vector<int> ns = rq.ns.empty() ? std::vector<int>{diagonal_n(rho)} : rq.ns;
      for (int nu : rq.nu_axes) {
        for (int n : ns) {
          tasks.push_back({c, rho, nu, n});
          distinct_n.push_back(n);
        }
      }
    }
  }
  std::sort(distinct_n.begin(), distinct_n.end());
  distinct_n.erase(std::unique(distinct_n.begin(), distinct_n.end()), distinct_n.end());
  std::vector<std::vector<std::uint8_t>> cracks(distinct_n.size());
  parallel_for(distinct_n.size(), jobs,
               [&](std::size_t k) { cracks[k] = generate_crack(rq.sequence, grid, distinct_n[k]); });

  const std::string gen = rq.sequence.name();
  std::vector<SigmaProbeReport> out(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const auto k = std::lower_bound(distinct_n.begin(), distinct_n.end(), task.n) - distinct_n.begin();
    const Window w = make_window(grid, rq.centers[task.center], task.rho);
    const auto res = min_cut(window_cut_problem(grid, medium, cracks[k], w, task.nu));
    SigmaProbeReport& r = out[t];
    r.generator = gen;
    r.n = task.n;
    r.center = rq.centers[task.center];
    r.rho = task.rho;
    r.nu_axis = task.nu;
    r.cost = res.cost;
    r.density = res.cost / (2.0 * w.radius * grid.h());
    r.certified = res.certified;
  });
  return out;
}

std::vector<SigmaClassification> classify_sigma(const std::vector<SigmaProbeReport>& reports,
                                                double alpha) {
  std::vector<SigmaClassification> out;
  std::vector<const SigmaProbeReport*> best;
  for (const auto& r : reports) {
    std::size_t k = 0;
    while (k < out.size() && !(out[k].center == r.center && out[k].nu_axis == r.nu_axis)) ++k;
    if (k == out.size()) {
      out.push_back({r.center, r.nu_axis, 0.0, false});
      best.push_back(&r);
      continue;
    }
    const auto* b = best[k];
    if (r.n > b->n || (r.n == b->n && r.rho < b->rho)) best[k] = &r;
  }
  const double tau = sigma_threshold(alpha);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].density = best[k]->density;
    out[k].in_limit = best[k]->density <= tau;
  }
  return out;
}

std::string sigma_probe_csv(const std::vector<SigmaProbeReport>& reports) {
  CsvTable t({"generator", "n", "x", "y", "rho", "nu", "density"});
  for (const auto& r : reports) {
    t.row()
        .add(r.generator)
        .add(r.n)
        .add(r.center[0])
        .add(r.center[1])
        .add(r.rho)
        .add(r.nu_axis == 0 ? "e1" : "e2")
        .add(r.density);
  }
  return t.str();
}

}  // namespace hfrac
