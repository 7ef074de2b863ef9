#include "hfrac/elastic.hpp"

#include <algorithm>
#include <cmath>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"

namespace hfrac {

LatticeEnergy bulk_energy_model(const Grid& grid, const Medium& medium) {
  LatticeEnergy en;
  en.num_nodes = grid.num_nodes();
  en.p = medium.p();
  en.lo.assign(grid.edge_lo().begin(), grid.edge_lo().end());
  en.hi.assign(grid.edge_hi().begin(), grid.edge_hi().end());
  const double h = grid.h();
  const double p = medium.p();
  if (grid.dimension() == 1) {
    const double scale = h * std::pow(h, -p);
    for (int c = 0; c < grid.num_cells(); ++c) {
      const double w = medium.bulk(0)[c] * scale;
      en.term_diff.push_back({c, -1});
      en.term_weight.push_back({w, w});
    }
    return en;
  }
  const double scale = 0.25 * h * h * std::pow(h, -p);
  const int cx = grid.nx() - 1;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const int i = c % cx;
    const int j = c / cx;
    const double wx = medium.bulk(0)[c] * scale;
    const double wy = medium.bulk(1)[c] * scale;
    const int bottom = grid.x_edge(i, j);
    const int top = grid.x_edge(i, j + 1);
    const int left = grid.y_edge(i, j);
    const int right = grid.y_edge(i + 1, j);
    for (int xe : {bottom, top}) {
      for (int ye : {left, right}) {
        en.term_diff.push_back({xe, ye});
        en.term_weight.push_back({wx, wy});
      }
    }
  }
  return en;
}

ElasticSolver::ElasticSolver(const Grid& grid, const Medium& medium, ConvexSolveOptions options)
    : grid_(&grid), medium_(&medium), options_(options), model_(bulk_energy_model(grid, medium)) {}

ElasticSolver::Constraints ElasticSolver::constrain(const CrackState& crack,
                                                    std::span<const double> datum,
                                                    const ScalarField* previous) const {
  const Grid& g = *grid_;
  if (datum.size() != static_cast<std::size_t>(g.num_dirichlet())) {
    throw ConfigError("datum has " + std::to_string(datum.size()) + " values, grid has " +
                      std::to_string(g.num_dirichlet()) + " Dirichlet nodes");
  }
  Constraints c;
  c.fixed.assign(g.num_nodes(), 0);
  c.values.assign(g.num_nodes(), 0.0);
  double sup = 0.0;
  for (int k = 0; k < g.num_dirichlet(); ++k) {
    if (!std::isfinite(datum[k])) throw ConfigError("datum value is not finite");
    sup = std::max(sup, std::abs(datum[k]));
    if (crack.contains(g.ghost_edge(k))) continue;
    const NodeId n = g.dirichlet_nodes()[k];
    c.fixed[n] = 1;
    c.values[n] = datum[k];
  }

  UnionFind uf(g.num_nodes());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!crack.contains(e)) uf.unite(g.edge_lo()[e], g.edge_hi()[e]);
  }
  std::vector<std::uint8_t> anchored(g.num_nodes(), 0);
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (c.fixed[n]) anchored[uf.find(n)] = 1;
  }
  std::vector<double> sum(g.num_nodes(), 0.0);
  std::vector<int> count(g.num_nodes(), 0);
  bool floating = false;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    const int r = uf.find(n);
    if (anchored[r]) continue;
    floating = true;
    if (previous && previous->values.size() == sum.size()) sum[r] += previous->values[n];
    ++count[r];
  }
  if (floating) {
    for (NodeId n = 0; n < g.num_nodes(); ++n) {
      const int r = uf.find(n);
      if (anchored[r]) continue;
      c.fixed[n] = 1;
      c.values[n] = std::clamp(sum[r] / count[r], -sup, sup);
    }
  }
  return c;
}

std::vector<double> ElasticSolver::extension(const CrackState& crack,
                                             std::span<const double> datum,
                                             const ScalarField* previous) const {
  auto c = constrain(crack, datum, previous);
  const auto disabled = crack.mask().first(grid_->num_edges());
  auto res = minimize_lattice_energy(model_, disabled, c.fixed, std::move(c.values), options_);
  double sup = 0.0;
  for (double v : datum) sup = std::max(sup, std::abs(v));
  for (double& v : res.u) v = std::clamp(v, -sup, sup);
  return res.u;
}

ElasticSolution ElasticSolver::solve(const CrackState& crack, std::span<const double> datum,
                                     const ScalarField* previous,
                                     std::span<const double> datum_rate) const {
  const Grid& g = *grid_;
  if (crack.capacity() != static_cast<std::size_t>(g.num_crack_ids())) {
    throw ConfigError("crack state does not belong to this grid");
  }
  auto c = constrain(crack, datum, previous);
  const auto disabled = crack.mask().first(g.num_edges());
  auto res = minimize_lattice_energy(model_, disabled, c.fixed, std::move(c.values), options_);

  // Truncation at the datum's sup norm never increases the energy.
  double sup = 0.0;
  for (double v : datum) sup = std::max(sup, std::abs(v));
  for (double& v : res.u) v = std::clamp(v, -sup, sup);

  ElasticSolution sol;
  sol.u.values = std::move(res.u);
  sol.u.open.assign(crack.ids().begin(), crack.ids().end());
  sol.bulk_energy = model_.evaluate(sol.u.values, disabled);
  sol.iterations = res.iterations;
  sol.residual = res.residual;

  const double h = g.h();
  const auto& u = sol.u.values;
  auto diff = [&](EdgeId e) {
    return crack.contains(e) ? 0.0 : (u[g.edge_hi()[e]] - u[g.edge_lo()[e]]) / h;
  };
  sol.cell_gradient.resize(g.num_cells());
  if (g.dimension() == 1) {
    for (int cidx = 0; cidx < g.num_cells(); ++cidx) sol.cell_gradient[cidx] = {diff(cidx), 0.0};
  } else {
    const int cx = g.nx() - 1;
    for (int cidx = 0; cidx < g.num_cells(); ++cidx) {
      const int i = cidx % cx;
      const int j = cidx / cx;
      sol.cell_gradient[cidx] = {0.5 * (diff(g.x_edge(i, j)) + diff(g.x_edge(i, j + 1))),
                                 0.5 * (diff(g.y_edge(i, j)) + diff(g.y_edge(i + 1, j)))};
    }
  }
  if (!datum_rate.empty()) sol.theta = work_integrand(sol, crack, datum_rate);
  return sol;
}

double ElasticSolver::optimal_bulk_energy(const CrackState& crack,
                                          std::span<const double> datum) const {
  auto c = constrain(crack, datum, nullptr);
  const auto disabled = crack.mask().first(grid_->num_edges());
  return minimize_lattice_energy(model_, disabled, c.fixed, std::move(c.values), options_).energy;
}

double ElasticSolver::bulk_energy(std::span<const double> u, const CrackState& crack) const {
  return model_.evaluate(u, crack.mask().first(grid_->num_edges()));
}

double ElasticSolver::work_integrand(const ElasticSolution& sol, const CrackState& crack,
                                     std::span<const double> datum_rate) const {
  bool zero = std::all_of(datum_rate.begin(), datum_rate.end(), [](double v) { return v == 0.0; });
  if (zero) return 0.0;
  const auto w = extension(crack, datum_rate, nullptr);
  return model_.directional_derivative(sol.u.values, w, crack.mask().first(grid_->num_edges()));
}

ElasticSolution solve_elastic(const Grid& grid, const Medium& medium, const CrackState& crack,
                              std::span<const double> datum, std::span<const double> datum_rate) {
  return ElasticSolver(grid, medium).solve(crack, datum, nullptr, datum_rate);
}

std::string solution_csv(const ElasticSolution& sol) {
  CsvTable t({"node", "value"});
  for (std::size_t n = 0; n < sol.u.values.size(); ++n) {
    t.row().add(static_cast<long>(n)).add(sol.u.values[n]);
  }
  return t.str();
}

}  // namespace hfrac
