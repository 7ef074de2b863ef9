#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "hfrac/errors.hpp"
#include "hfrac/fields.hpp"
#include "hfrac/grid.hpp"
#include "hfrac/medium.hpp"

using namespace hfrac;

TEST_CASE("1D grid spacing and Dirichlet ends") {
  const Grid g = build_grid(1, {1.0, 0.0}, {11, 1}, {{Face::left, Face::right}, {}});
  CHECK(g.h() == doctest::Approx(0.1).epsilon(1e-15));
  REQUIRE(g.num_dirichlet() == 2);
  CHECK(g.dirichlet_nodes()[0] == 0);
  CHECK(g.dirichlet_nodes()[1] == 10);
  CHECK(g.num_edges() == 10);
  CHECK(g.measure(3) == 1.0);
  CHECK(g.measure(g.ghost_edge(1)) == 1.0);
}

TEST_CASE("2D 5x5 grid edge count matches brute-force adjacency") {
  const Grid g = build_grid(2, {2.0, 2.0}, {5, 5}, {{Face::bottom, Face::top}, {}});
  CHECK(g.num_nodes() == 25);
  // Oracle: count node pairs at lattice distance one.
  int pairs = 0;
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    for (NodeId b = a + 1; b < g.num_nodes(); ++b) {
      const auto pa = g.node_position(a);
      const auto pb = g.node_position(b);
      const double d = std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
      if (std::abs(d - g.h()) < 1e-12) ++pairs;
    }
  }
  CHECK(pairs == 40);
  CHECK(g.num_edges() == 40);
  std::set<std::pair<int, int>> seen;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge ed = g.edge(e);
    CHECK(seen.insert({ed.lo, ed.hi}).second);
    CHECK((ed.axis == 0 || ed.axis == 1));
  }
  CHECK(g.num_dirichlet() == 10);
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(build_grid(1, {1.0, 0.0}, {1, 1}, {}), ConfigError);
  CHECK_THROWS_AS(build_grid(2, {1.0, 1.0}, {5, 1}, {}), ConfigError);
  CHECK_THROWS_AS(build_grid(1, {0.0, 0.0}, {5, 1}, {}), ConfigError);
  CHECK_THROWS_AS(build_grid(2, {1.0, 2.0}, {5, 5}, {}), ConfigError);
  CHECK_THROWS_AS(build_grid(2, {1.0, 1.0}, {5, 5}, {{}, {12}}), ConfigError);
}

TEST_CASE("boundary edges carry half measure so the straight cut of a square has its width") {
  const Grid g = build_grid(2, {2.0, 2.0}, {9, 9}, {}, {-1.0, -1.0});
  double midline = 0.0;
  for (int i = 0; i < g.nx(); ++i) midline += g.measure(g.y_edge(i, 4));
  CHECK(midline == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("periodic sampling of a two-phase 1D cell") {
  const Grid g = build_grid(1, {1.0, 0.0}, {9, 1}, {{Face::left, Face::right}, {}});
  MediumSpec cell;
  cell.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  const Medium m = sample_periodic({cell, 0.5}, g);
  // Oracle: direct modular arithmetic on the cell centres.
  for (int c = 0; c < g.num_cells(); ++c) {
    const double x = (c + 0.5) * 0.125;
    const double y = std::fmod(x / 0.5, 1.0);
    CHECK(m.bulk()[c] == (y < 0.5 ? 1.0 : 4.0));
  }
  const std::vector<double> expected{1, 1, 4, 4, 1, 1, 4, 4};
  CHECK(std::vector<double>(m.bulk().begin(), m.bulk().end()) == expected);
  CHECK_THROWS_AS(sample_periodic({cell, 0.0}, g), ConfigError);
  CHECK_THROWS_AS(sample_periodic({cell, -1.0}, g), ConfigError);
}

TEST_CASE("constant cell samples to a constant medium for any epsilon") {
  const Grid g = build_grid(2, {1.0, 1.0}, {17, 17}, {{Face::left}, {}});
  MediumSpec cell;
  cell.bulk = FieldSpec::constant(3.0);
  cell.toughness = FieldSpec::constant(2.0);
  for (double eps : {1.0, 0.3, 0.0625}) {
    const Medium m = sample_periodic({cell, eps}, g);
    for (double a : m.bulk()) CHECK(a == 3.0);
    for (double k : m.toughness()) CHECK(k == 2.0);
  }
}

TEST_CASE("declared bounds are enforced") {
  const Grid g = build_grid(1, {1.0, 0.0}, {5, 1}, {{Face::left}, {}});
  MediumSpec spec;
  spec.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  spec.alpha = 1.0;
  spec.beta = 3.0;
  CHECK_THROWS_AS(sample_medium(spec, g), ConfigError);
  spec.beta = 4.0;
  const Medium m = sample_medium(spec, g);
  for (double a : m.bulk()) {
    CHECK(a >= m.alpha());
    CHECK(a <= m.beta());
  }
  spec.alpha = 0.0;
  CHECK_THROWS_AS(sample_medium(spec, g), ConfigError);
  MediumSpec aniso;
  aniso.p = 3.0;
  aniso.bulk_y = FieldSpec::constant(2.0);
  const Grid g2 = build_grid(2, {1.0, 1.0}, {5, 5}, {});
  CHECK_THROWS_AS(sample_medium(aniso, g2), ConfigError);
}

TEST_CASE("cached surface energy matches recomputation") {
  const Grid g = build_grid(2, {1.0, 1.0}, {17, 17}, {{Face::left, Face::right}, {}});
  MediumSpec spec;
  spec.toughness = FieldSpec::checkerboard(1.0, 3.7);
  spec.toughness_y = FieldSpec::layered(0, {0.4, 2.0, 1.1}, {0.3, 0.3, 0.4});
  const Medium m = sample_medium(spec, g);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, g.num_crack_ids() - 1);
  CrackState k(g);
  CrackState prev = k;
  for (int it = 0; it < 300; ++it) {
    k.insert(pick(rng), m);
    CHECK(prev.subset_of(k));
    CHECK(k.surface_energy() == doctest::Approx(k.recompute_surface_energy(m)).epsilon(1e-15));
    CHECK(k.surface_energy() >= prev.surface_energy());
    prev = k;
  }
  const auto ids = k.ids();
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}
