#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hfrac/elastic.hpp"
#include "hfrac/errors.hpp"

using namespace hfrac;

namespace {

Grid bar(int nodes) { return build_grid(1, {1.0, 0.0}, {nodes, 1}, {{Face::left, Face::right}, {}}); }

MediumSpec layered_bar(double p = 2.0) {
  MediumSpec s;
  s.p = p;
  s.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  return s;
}

// Oracle: exact minimum of sum_c a_c h |du_c / h|^p with u(0)=0, u(1)=t.
double bar_energy_oracle(const Medium& m, double h, double t) {
  const double p = m.p();
  double s = 0.0;
  for (double a : m.bulk()) s += h * std::pow(a, -1.0 / (p - 1.0));
  return std::pow(std::abs(t), p) / std::pow(s, p - 1.0);
}

}  // namespace

TEST_CASE("homogeneous bar is linear with energy t^2") {
  const Grid g = bar(11);
  const Medium m = sample_medium(MediumSpec{}, g);
  const double t = 0.7;
  const auto sol = solve_elastic(g, m, CrackState(g), std::vector<double>{0.0, t});
  CHECK(sol.bulk_energy == doctest::Approx(t * t).epsilon(1e-13));
  for (int n = 0; n < g.num_nodes(); ++n) {
    CHECK(sol.u.values[n] == doctest::Approx(t * n * 0.1).epsilon(1e-12));
  }
}

TEST_CASE("layered bar reproduces t^2 / int a^-1") {
  const Grid g = bar(201);
  const Medium m = sample_medium(layered_bar(), g);
  double H = 0.0;
  for (double a : m.bulk()) H += g.h() / a;
  CHECK(H == doctest::Approx(0.625).epsilon(1e-14));
  for (double t : {0.1, 0.5, 1.3}) {
    const auto sol = solve_elastic(g, m, CrackState(g), std::vector<double>{0.0, t},
                                   std::vector<double>{0.0, 1.0});
    CHECK(std::abs(sol.bulk_energy - 1.6 * t * t) <= 1e-12 * 1.6 * t * t);
    // Work integrand: d/dt (t^2 / H) = 2 t / H.
    CHECK(sol.theta == doctest::Approx(2.0 * t / H).epsilon(1e-11));
  }
}

TEST_CASE("p-Laplacian bar matches the closed form") {
  for (double p : {1.5, 3.0, 4.0}) {
    CAPTURE(p);
    const Grid g = bar(101);
    const Medium m = sample_medium(layered_bar(p), g);
    const double t = 0.8;
    const auto sol = solve_elastic(g, m, CrackState(g), std::vector<double>{0.0, t},
                                   std::vector<double>{0.0, 1.0});
    const double e = bar_energy_oracle(m, g.h(), t);
    CHECK(sol.bulk_energy == doctest::Approx(e).epsilon(1e-10));
    // theta = dE/dt = p E / t for the p-homogeneous ramp
    CHECK(sol.theta == doctest::Approx(p * e / t).epsilon(1e-8));
  }
}

TEST_CASE("2D uniform strip under p=3 gives a t^p") {
  const Grid g = build_grid(2, {1.0, 1.0}, {9, 9}, {{Face::left, Face::right}, {}});
  MediumSpec s;
  s.p = 3.0;
  s.bulk = FieldSpec::constant(2.0);
  const Medium m = sample_medium(s, g);
  std::vector<double> datum;
  for (NodeId n : g.dirichlet_nodes()) datum.push_back(g.node_i(n) == 0 ? 0.0 : 0.5);
  const auto sol = solve_elastic(g, m, CrackState(g), datum);
  CHECK(sol.bulk_energy == doctest::Approx(2.0 * 0.125).epsilon(1e-10));
}

TEST_CASE("cut bar carries no energy and no work") {
  const Grid g = bar(21);
  const Medium m = sample_medium(layered_bar(), g);
  CrackState k(g);
  k.insert(7, m);
  const auto sol = solve_elastic(g, m, k, std::vector<double>{0.0, 2.0},
                                 std::vector<double>{0.0, 1.0});
  CHECK(sol.bulk_energy == 0.0);
  CHECK(sol.theta == 0.0);
  CHECK(sol.u.sup_norm() <= 2.0);
}

TEST_CASE("doubling the coefficient doubles the work integrand") {
  const Grid g = bar(41);
  MediumSpec s = layered_bar();
  const Medium m1 = sample_medium(s, g);
  const Medium m2 = sample_medium(s.scaled(2.0, 1.0), g);
  const std::vector<double> d{0.0, 0.9}, r{0.0, 1.0};
  const auto a = solve_elastic(g, m1, CrackState(g), d, r);
  const auto b = solve_elastic(g, m2, CrackState(g), d, r);
  CHECK(b.theta == doctest::Approx(2.0 * a.theta).epsilon(1e-12));
}

TEST_CASE("released Dirichlet node lets the bar relax") {
  const Grid g = bar(11);
  const Medium m = sample_medium(MediumSpec{}, g);
  CrackState k(g);
  k.insert(g.ghost_edge(1), m);
  const auto sol = solve_elastic(g, m, k, std::vector<double>{0.0, 1.0});
  CHECK(sol.bulk_energy == 0.0);
  CHECK(sol.u.values.back() == 0.0);
}

TEST_CASE("floating component takes the previous mean, clamped") {
  const Grid g = bar(11);
  const Medium m = sample_medium(MediumSpec{}, g);
  CrackState k(g);
  k.insert(2, m);
  k.insert(6, m);
  ScalarField prev;
  prev.values.assign(11, 0.0);
  for (int n = 3; n <= 6; ++n) prev.values[n] = 0.25 * n;
  ElasticSolver solver(g, m);
  const auto sol = solver.solve(k, std::vector<double>{0.0, 1.0}, &prev);
  for (int n = 3; n <= 6; ++n) CHECK(sol.u.values[n] == doctest::Approx(1.0));
  const auto sol0 = solver.solve(k, std::vector<double>{0.0, 1.0});
  for (int n = 3; n <= 6; ++n) CHECK(sol0.u.values[n] == 0.0);
}

TEST_CASE("enlarging the crack never increases the optimal bulk energy") {
  const Grid g = build_grid(2, {1.0, 1.0}, {13, 13}, {{Face::bottom, Face::top}, {}});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, g.num_crack_ids() - 1);
  for (double p : {2.0, 3.0}) {
    MediumSpec s;
    s.p = p;
    s.bulk = FieldSpec::checkerboard(1.0, 4.0);
    const Medium m = sample_medium(s, g);
    ElasticSolver solver(g, m);
    std::vector<double> datum;
    for (NodeId n : g.dirichlet_nodes()) datum.push_back(g.node_j(n) == 0 ? -0.5 : 0.5);
    CrackState k(g);
    double last = solver.optimal_bulk_energy(k, datum);
    for (int it = 0; it < 40; ++it) {
      k.insert(pick(rng), m);
      const double e = solver.optimal_bulk_energy(k, datum);
      CHECK(e <= last * (1.0 + 1e-12) + 1e-15);
      last = e;
    }
  }
}

TEST_CASE("energy bounds against the unit-coefficient energy") {
  const Grid g = build_grid(2, {1.0, 1.0}, {17, 17}, {{Face::left, Face::right}, {}});
  MediumSpec s;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  s.alpha = 1.0;
  s.beta = 4.0;
  const Medium m = sample_medium(s, g);
  const Medium unit = sample_medium(MediumSpec{}, g);
  std::vector<double> datum;
  for (NodeId n : g.dirichlet_nodes()) datum.push_back(g.node_i(n) == 0 ? 0.0 : 1.0);
  CrackState k(g);
  k.insert(g.x_edge(8, 8), m);
  const auto sol = solve_elastic(g, m, k, datum);
  const double plain = ElasticSolver(g, unit).bulk_energy(sol.u.values, k);
  CHECK(m.alpha() * plain <= sol.bulk_energy * (1 + 1e-12));
  CHECK(sol.bulk_energy <= m.beta() * plain * (1 + 1e-12));
}

TEST_CASE("first-order optimality at free nodes on a large grid") {
  const Grid g = build_grid(2, {1.0, 1.0}, {129, 129}, {{Face::left, Face::right}, {}});
  MediumSpec s;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  const Medium m = sample_medium(s, g);
  std::vector<double> datum;
  for (NodeId n : g.dirichlet_nodes()) datum.push_back(g.node_i(n) == 0 ? 0.0 : 1.0);
  ElasticSolver solver(g, m);
  CrackState k(g);
  const auto sol = solver.solve(k, datum);
  std::vector<double> grad(g.num_nodes());
  std::vector<std::uint8_t> none(g.num_edges(), 0);
  solver.model().gradient(sol.u.values, none, grad);
  double worst = 0.0;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (g.ghost_index(n) < 0) worst = std::max(worst, std::abs(grad[n]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("datum size mismatch is a configuration error") {
  const Grid g = bar(5);
  const Medium m = sample_medium(MediumSpec{}, g);
  CHECK_THROWS_AS(solve_elastic(g, m, CrackState(g), std::vector<double>{0.0}), ConfigError);
}
