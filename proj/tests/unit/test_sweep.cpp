#include <doctest.h>

#include <chrono>
#include <cmath>

#include "hfrac/errors.hpp"
#include "hfrac/sweep.hpp"

using namespace hfrac;

namespace {

MediumSpec bench_cell() {
  MediumSpec s;
  s.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  s.toughness = FieldSpec::layered(0, {2.0, 1.0}, {0.5, 0.5});
  return s;
}

SweepOptions bench_options() {
  SweepOptions o;
  o.epsilons = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  o.jobs = 4;
  return o;
}

}  // namespace

TEST_CASE("1D benchmark sweep converges to min(1.6 t^2, 1)") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_sweep(bench_cell(), bench_options());
  MESSAGE("sweep took " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s");
  CHECK(rep.a_hom[0] == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(rep.kappa_hom[0] == 1.0);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    CHECK(rep.homogenized.energy[i].total() ==
          doctest::Approx(std::min(1.6 * t * t, 1.0)).epsilon(1e-10));
  }
  CHECK(rep.verdict.ok());
  CHECK(rep.deviation.back().total <= 0.05);
  CHECK(lsc_checks(rep).ok());
  // Crack time tends to sqrt(kappa_min / a_harm).
  const double tc = std::sqrt(1.0 / 1.6);
  for (const auto& r : rep.runs) {
    REQUIRE(r.crack_step < rep.times.size());
    CHECK(std::abs(rep.times[r.crack_step] - tc) <= 0.01 + 1e-12);
  }
}

TEST_CASE("non-commensurate epsilons converge with an improving deviation") {
  SweepOptions o;
  o.epsilons = {0.3, 0.15, 0.075, 0.0375};
  o.jobs = 2;
  const auto rep = run_sweep(bench_cell(), o);
  CHECK(rep.deviation.front().total > 1e-3);
  int violations = 0;
  for (std::size_t k = 1; k < rep.deviation.size(); ++k) {
    const double up = rep.deviation[k].total - rep.deviation[k - 1].total;
    if (up > 0.0) {
      ++violations;
      CHECK(up <= 0.005);
    }
  }
  CHECK(violations <= 1);
  CHECK(rep.verdict.total);
  CHECK(lsc_checks(rep).ok());
}

TEST_CASE("constant cell gives zero deviations and zero pre-crack margins") {
  MediumSpec s;
  s.bulk = FieldSpec::constant(2.0);
  s.toughness = FieldSpec::constant(1.5);
  SweepOptions o;
  o.epsilons = {0.25, 0.125};
  const auto rep = run_sweep(s, o);
  for (const auto& d : rep.deviation) {
    CHECK(d.total == 0.0);
    CHECK(d.bulk == 0.0);
    CHECK(d.surface == 0.0);
  }
  const auto lsc = lsc_checks(rep);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (i < rep.homogenized.crack_step) CHECK(lsc.rows[i].total_margin == 0.0);
  }
}

TEST_CASE("corrupted surface table is flagged by the lsc checks") {
  const MediumSpec cell = bench_cell();
  TableOptions to;
  to.power_family = true;
  auto table = build_effective_table(cell, 1, to);
  for (auto& s : table.surface) s.value *= 1.5;
  const auto rep = run_sweep(cell, table, bench_options());
  const auto lsc = lsc_checks(rep);
  CHECK_FALSE(lsc.ok());
  CHECK(lsc.worst_margin < -0.02);
  CHECK_FALSE(rep.verdict.ok());
}

TEST_CASE("under-resolved and malformed sweeps are refused") {
  SweepOptions o;
  o.epsilons = {0.25, 0.125};
  o.nodes = 33;  // h = 1/32 > 0.125 / 8
  CHECK_THROWS_AS(run_sweep(bench_cell(), o), ConfigError);
  o.nodes = 0;
  o.epsilons = {0.125, 0.25};
  CHECK_THROWS_AS(run_sweep(bench_cell(), o), ConfigError);
  o.epsilons = {};
  CHECK_THROWS_AS(run_sweep(bench_cell(), o), ConfigError);
}

TEST_CASE("report artifacts are reproducible across worker counts") {
  SweepOptions o;
  o.epsilons = {0.25, 0.125, 0.0625};
  o.jobs = 1;
  const auto a = run_sweep(bench_cell(), o);
  o.jobs = 3;
  const auto b = run_sweep(bench_cell(), o);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(sweep_verdict_text(a, lsc_checks(a)) == sweep_verdict_text(b, lsc_checks(b)));
  const auto text = sweep_verdict_text(a, lsc_checks(a));
  CHECK(text.rfind("dimension=1\nbackend=exhaustive1d\n", 0) == 0);
  CHECK(sweep_csv(a).rfind("epsilon,t,bulk,surface,total,bulk_hom,surface_hom,total_hom,dev_total\n", 0) == 0);
}

TEST_CASE("2D sweep reports the restricted crack family") {
  MediumSpec s;
  s.bulk = FieldSpec::layered(1, {1.0, 4.0}, {0.5, 0.5});
  s.toughness = FieldSpec::layered(1, {2.0, 1.0}, {0.5, 0.5});
  SweepOptions o;
  o.dimension = 2;
  o.epsilons = {0.5};
  o.nodes = 17;
  o.t_end = 1.2;
  o.dt = 0.1;
  o.table_resolution = 16;
  o.jobs = 3;
  const auto rep = run_sweep(s, o);
  CHECK(rep.a_hom[0] == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(rep.a_hom[1] == doctest::Approx(1.6).epsilon(1e-10));
  CHECK(rep.kappa_hom[1] == doctest::Approx(1.0).epsilon(1e-10));
  const auto text = sweep_verdict_text(rep, lsc_checks(rep));
  CHECK(text.find("caveat=crack family restricted to") != std::string::npos);
}
