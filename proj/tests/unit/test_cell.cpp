#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "hfrac/cell.hpp"
#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"

using namespace hfrac;

namespace {

MediumSpec layers_y(double a0, double a1) {
  MediumSpec s;
  s.bulk = FieldSpec::layered(1, {a0, a1}, {0.5, 0.5});
  return s;
}

// Oracle: 1D periodic cell energy |xi|^p / (mean a^{-1/(p-1)})^{p-1} at
// cell-centre samples.
double layered_1d_oracle(const FieldSpec& a, double p, double xi, int R) {
  double s = 0.0;
  for (int k = 0; k < R; ++k) s += std::pow(a.evaluate({(k + 0.5) / R, 0.0}, k), -1.0 / (p - 1.0)) / R;
  return std::pow(std::abs(xi), p) / std::pow(s, p - 1.0);
}

}  // namespace

TEST_CASE("constant cell: corrector vanishes") {
  for (double p : {2.0, 3.0}) {
    MediumSpec s;
    s.p = p;
    s.bulk = FieldSpec::constant(2.5);
    CHECK(f_hom_cell(s, 2, {0.6, -0.8}, 16) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f_hom_cell(s, 1, {-2.0, 0.0}, 16) == doctest::Approx(2.5 * std::pow(2.0, p)).epsilon(1e-12));
  }
}

TEST_CASE("1D layers give the harmonic mean") {
  MediumSpec s;
  s.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  CHECK(f_hom_cell(s, 1, {1.0, 0.0}, 64) == doctest::Approx(1.6).epsilon(1e-13));
  CHECK(f_hom_cell(s, 1, {-0.5, 0.0}, 64) == doctest::Approx(0.4).epsilon(1e-13));
  for (double p : {1.5, 3.0}) {
    s.p = p;
    CHECK(f_hom_cell(s, 1, {1.3, 0.0}, 32) ==
          doctest::Approx(layered_1d_oracle(s.bulk, p, 1.3, 32)).epsilon(1e-9));
  }
}

TEST_CASE("2D layers: arithmetic mean along, harmonic across") {
  const MediumSpec s = layers_y(1.0, 4.0);
  CHECK(f_hom_cell(s, 2, {1.0, 0.0}, 128) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f_hom_cell(s, 2, {0.0, 1.0}, 128) == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("checkerboard converges towards the geometric mean") {
  MediumSpec s;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  const double f32 = f_hom_cell(s, 2, {1.0, 0.0}, 32);
  const double f64 = f_hom_cell(s, 2, {1.0, 0.0}, 64);
  const double f128 = f_hom_cell(s, 2, {1.0, 0.0}, 128);
  CHECK(std::abs(f128 - f64) < std::abs(f64 - f32));
  CHECK(f128 > 2.0);
  CHECK(f128 == doctest::Approx(2.0).epsilon(0.01));
  // Symmetry of the checkerboard: isotropic effective tensor.
  CHECK(f_hom_cell(s, 2, {0.0, 1.0}, 64) == doctest::Approx(f64).epsilon(1e-12));
}

TEST_CASE("f_hom is p-homogeneous, convex and differentiable along samples") {
  MediumSpec s;
  s.p = 3.0;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  const std::array<double, 2> xi{0.6, 0.3};
  const double f1 = f_hom_cell(s, 2, xi, 16);
  const double f2 = f_hom_cell(s, 2, {2.0 * xi[0], 2.0 * xi[1]}, 16);
  CHECK(f2 == doctest::Approx(8.0 * f1).epsilon(1e-8));
  // midpoint convexity between two unrelated samples
  const std::array<double, 2> a{1.0, -0.2}, b{-0.3, 0.9};
  const double fm = f_hom_cell(s, 2, {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}, 16);
  CHECK(fm <= 0.5 * (f_hom_cell(s, 2, a, 16) + f_hom_cell(s, 2, b, 16)) + 1e-8);
  // central vs one-sided differences: the gap shrinks like step^1 while the
  // central-vs-central gap shrinks like step^2
  auto fx = [&](double d) { return f_hom_cell(s, 2, {xi[0] + d, xi[1]}, 16); };
  double prev_gap = 0.0;
  for (double step : {1e-2, 5e-3}) {
    const double central = (fx(step) - fx(-step)) / (2 * step);
    const double fine = (fx(step / 2) - fx(-step / 2)) / step;
    const double gap = std::abs(central - fine);
    if (prev_gap > 0.0) CHECK(gap < 0.3 * prev_gap);
    prev_gap = gap;
    const double forward = (fx(step) - f1) / step;
    CHECK(std::abs(forward - central) < 10.0 * step * std::max(1.0, std::abs(central)));
  }
}

TEST_CASE("g_hom of constant toughness is the constant in every direction") {
  MediumSpec s;
  s.toughness = FieldSpec::constant(1.7);
  for (auto d : {LatticeDirection{0, 1}, LatticeDirection{1, 0}, LatticeDirection{1, 1},
                 LatticeDirection{-2, 5}, LatticeDirection{7, 3}}) {
    CHECK(g_hom_cell(s, 2, d, 16) == doctest::Approx(1.7).epsilon(1e-12));
  }
  CHECK(g_hom_cell(s, 1, {1, 0}, 16) == 1.7);
}

TEST_CASE("layered toughness: weak stripe along, layer average across") {
  MediumSpec s;
  s.toughness = FieldSpec::layered(1, {1.0, 2.0}, {0.5, 0.5});
  for (int m = 1; m <= 4; ++m) {
    CHECK(g_hom_cell(s, 2, {0, 1}, 32, m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g_hom_cell(s, 2, {1, 0}, 32, m) == doctest::Approx(1.5).epsilon(1e-12));
  }
  MediumSpec s1;
  s1.toughness = FieldSpec::layered(0, {2.0, 1.0}, {0.5, 0.5});
  CHECK(g_hom_cell(s1, 1, {1, 0}, 32) == 1.0);
}

TEST_CASE("g_hom decreases with the strip width and respects the bounds") {
  MediumSpec s;
  s.toughness = FieldSpec::checkerboard(1.0, 3.0);
  s.toughness_y = FieldSpec::layered(0, {2.0, 1.0, 3.0}, {0.25, 0.25, 0.5});
  for (auto d : {LatticeDirection{1, 2}, LatticeDirection{0, 1}, LatticeDirection{3, -1}}) {
    double last = 1e300;
    for (int m = 1; m <= 3; ++m) {
      const double g = g_hom_cell(s, 2, d, 16, m);
      CHECK(g <= last + 1e-9);
      CHECK(g >= 1.0 - 1e-12);
      CHECK(g <= 3.0 + 1e-12);
      last = g;
    }
  }
}

TEST_CASE("cut cost per period is subadditive in the period vector") {
  MediumSpec s;
  s.toughness = FieldSpec::checkerboard(1.0, 3.0);
  auto cost = [&](LatticeDirection d) { return d.l1() * g_hom_cell(s, 2, d, 16, 2); };
  // Period vectors (n2, -n1): (1,0) + (0,1) = (1,1) corresponds to normals
  // (0,1) + (1,0) -> (1,1) up to orientation.
  CHECK(cost({-1, 1}) <= cost({0, 1}) + cost({1, 0}) + 1e-6);
  CHECK(cost({1, 2}) <= cost({1, 1}) + cost({0, 1}) + 1e-6);
  CHECK(cost({2, 1}) <= cost({1, 1}) + cost({1, 0}) + 1e-6);
}

TEST_CASE("invalid cell requests") {
  MediumSpec s;
  CHECK_THROWS_AS(f_hom_cell(s, 2, {1.0, 0.0}, 8), ConfigError);
  CHECK_THROWS_AS(g_hom_cell(s, 2, {0, 0}, 16), ConfigError);
  CHECK_THROWS_AS(g_hom_cell(s, 2, {9, 1}, 16), ConfigError);
  CHECK_THROWS_AS(g_hom_cell(s, 2, {0, 1}, 16, 0), ConfigError);
}

TEST_CASE("lattice directions are canonical and distinct") {
  const auto e1 = lattice_direction(0.0);
  CHECK((e1.n1 == 1 && e1.n2 == 0));
  const auto e2 = lattice_direction(std::acos(-1.0) / 2);
  CHECK((e2.n1 == 0 && e2.n2 == 1));
  const auto d45 = lattice_direction(std::acos(-1.0) / 4);
  CHECK((d45.n1 == 1 && d45.n2 == 1));
}

TEST_CASE("scaling check: no interaction between bulk and surface factors") {
  MediumSpec s;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  s.toughness = FieldSpec::layered(1, {1.0, 2.0}, {0.5, 0.5});
  const std::vector<std::array<double, 2>> xis{{1.0, 0.0}, {0.6, 0.8}};
  const std::vector<LatticeDirection> nus{{0, 1}, {1, 0}, {1, 2}};
  const auto ident = scaling_check(1.0, 1.0, s, 2, 32, xis, nus);
  CHECK(ident.passed());
  for (const auto& r : ident.rows) CHECK(r.scaled == r.base);
  const auto rep = scaling_check(3.0, 2.0, s, 2, 32, xis, nus, 2);
  CHECK(rep.passed());
  for (const auto& r : rep.rows) CHECK(r.relative_error <= 1e-10);
  s.p = 3.0;
  CHECK(scaling_check(0.5, 7.0, s, 2, 16, xis, nus).passed());
  CHECK_THROWS_AS(scaling_check(0.0, 1.0, s, 2, 16, xis, nus), ConfigError);
}

TEST_CASE("effective table: samples, checks, CSV round trip") {
  MediumSpec s;
  s.bulk = FieldSpec::checkerboard(1.0, 4.0);
  s.toughness = FieldSpec::layered(1, {1.0, 2.0}, {0.5, 0.5});
  TableOptions opt;
  opt.resolution = 32;
  const auto t = build_effective_table(s, 2, opt);
  CHECK(t.bulk.size() == 64);
  CHECK(t.surface.size() == 16);
  const auto checks = check_effective_table(t, s);
  for (const auto& f : checks.failures) MESSAGE(f);
  CHECK(checks.ok());
  CHECK(t.g_hom({0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(t.g_hom({-1.0, 0.0}) == doctest::Approx(1.5));
  for (const auto& b : t.bulk) CHECK(b.diagnostic < 0.05 * b.value + 1e-12);

  opt.power_family = true;
  opt.jobs = 3;
  const auto tp = build_effective_table(s, 2, opt);
  CHECK(tp.bulk.size() == 16);
  CHECK(tp.f_hom({1.0, 0.0}) == t.f_hom({1.0, 0.0}));

  const auto dir = std::filesystem::temp_directory_path() / "hfrac_cell_test";
  write_file_atomic(dir / "table.csv", effective_table_csv(t));
  const auto back = read_effective_table(dir / "table.csv");
  CHECK(back.dimension == 2);
  CHECK(back.p == 2.0);
  REQUIRE(back.bulk.size() == t.bulk.size());
  for (std::size_t k = 0; k < t.bulk.size(); ++k) CHECK(back.bulk[k].value == t.bulk[k].value);
  CHECK(back.g_hom({1.0, 0.0}) == t.g_hom({1.0, 0.0}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupted table fails the bound checks") {
  MediumSpec s;
  s.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  s.toughness = FieldSpec::layered(0, {1.0, 2.0}, {0.5, 0.5});
  TableOptions opt;
  opt.resolution = 16;
  auto t = build_effective_table(s, 1, opt);
  CHECK(check_effective_table(t, s).ok());
  t.surface[0].value *= 3.0;
  t.bulk[1].value *= 1.01;
  const auto c = check_effective_table(t, s);
  CHECK_FALSE(c.ok());
  CHECK(c.failures.size() >= 2);
}
