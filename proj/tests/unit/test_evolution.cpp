#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "hfrac/errors.hpp"
#include "hfrac/evolution.hpp"

using namespace hfrac;

namespace {

Grid bar(int nodes) { return build_grid(1, {1.0, 0.0}, {nodes, 1}, {{Face::left, Face::right}, {}}); }

BoundaryDatum bar_ramp(double t_end, double dt) {
  return BoundaryDatum::ramp(BoundaryDatum::uniform_times(t_end, dt), {0.0, 1.0});
}

EvolutionOptions with(Backend b, int jobs = 1) {
  EvolutionOptions o;
  o.backend = b;
  o.jobs = jobs;
  return o;
}

// Oracle for the 1D global scheme: the crack appears at the first t_i with
// t_i^2 / H > kappa_min and the energy is min(t^2 / H, kappa_min) afterwards.
std::size_t first_crack_step(const EvolutionTrace& tr) {
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    if (!tr.steps[i].state.crack.empty()) return i;
  }
  return tr.steps.size();
}

MediumSpec hetero_bar() {
  MediumSpec s;
  s.bulk = FieldSpec::layered(0, {1.0, 4.0}, {0.5, 0.5});
  s.toughness = FieldSpec::layered(0, {2.0, 1.0}, {0.5, 0.5});
  return s;
}

}  // namespace

TEST_CASE("homogeneous bar cracks at the first step past t = 1") {
  const Grid g = bar(201);
  const Medium m = sample_medium(MediumSpec{}, g);
  const auto datum = bar_ramp(1.5, 0.01);
  const auto tr = Evolution(g, m, datum, with(Backend::exhaustive1d)).run();
  const std::size_t ic = first_crack_step(tr);
  REQUIRE(ic < tr.steps.size());
  CHECK(tr.steps[ic].t == doctest::Approx(1.01).epsilon(1e-12));
  // Ties go to the leftmost site.
  CHECK(tr.steps[ic].state.crack.ids().size() == 1);
  CHECK(tr.steps[ic].state.crack.ids()[0] == 0);
  double worst = 0.0;
  for (const auto& s : tr.steps) worst = std::max(worst, std::abs(s.energy.total() - std::min(s.t * s.t, 1.0)));
  CHECK(worst <= 2.0 * 0.01);
}

TEST_CASE("energy balance residual is O(delta) and halves with delta") {
  const Grid g = bar(201);
  const Medium m = sample_medium(MediumSpec{}, g);
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    CAPTURE(dt);
    const auto datum = bar_ramp(1.5, dt);
    const auto bal = energy_balance_audit(Evolution(g, m, datum, with(Backend::exhaustive1d)).run());
    CHECK(bal.delta == doctest::Approx(dt));
    CHECK(bal.max_abs <= 3.0 * dt);
    if (prev > 0.0) CHECK(bal.max_abs / prev == doctest::Approx(0.5).epsilon(0.1));
    prev = bal.max_abs;
  }
}

TEST_CASE("heterogeneous bar cracks near sqrt(H kappa_min) in the weak half") {
  const Grid g = bar(201);
  const Medium m = sample_medium(hetero_bar(), g);
  const auto datum = bar_ramp(1.2, 0.01);
  const auto tr = Evolution(g, m, datum, with(Backend::exhaustive1d)).run();
  const std::size_t ic = first_crack_step(tr);
  REQUIRE(ic < tr.steps.size());
  const double tc = std::sqrt(0.625);
  CHECK(tr.steps[ic].t > tc);
  CHECK(tr.steps[ic].t - tc <= 0.01);
  const EdgeId e = tr.steps[ic].state.crack.ids()[0];
  CHECK(g.site_position(e)[0] > 0.5);
}

TEST_CASE("exhaustive and generic 1D backends agree") {
  const Grid g = bar(41);
  const Medium m = sample_medium(hetero_bar(), g);
  const auto datum = bar_ramp(1.2, 0.02);
  const auto a = Evolution(g, m, datum, with(Backend::exhaustive1d)).run();
  const auto b = Evolution(g, m, datum, with(Backend::generic1d)).run();
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CAPTURE(i);
    CHECK(a.steps[i].state.crack == b.steps[i].state.crack);
    CHECK(a.steps[i].energy.total() == doctest::Approx(b.steps[i].energy.total()).epsilon(1e-10));
  }
  auto body = [](const std::string& csv) { return csv.substr(csv.find("step,")); };
  CHECK(body(crack_log_csv(a)) == body(crack_log_csv(b)));
}

TEST_CASE("zero datum keeps the crack empty and the balance exact") {
  const Grid g = bar(21);
  const Medium m = sample_medium(MediumSpec{}, g);
  const auto datum = BoundaryDatum::ramp(BoundaryDatum::uniform_times(1.0, 0.1), {0.0, 0.0});
  const auto tr = Evolution(g, m, datum, with(Backend::exhaustive1d)).run();
  for (const auto& s : tr.steps) {
    CHECK(s.state.crack.empty());
    CHECK(s.energy.total() == 0.0);
  }
  CHECK(energy_balance_audit(tr).max_abs == 0.0);
}

TEST_CASE("fully cut state is left unchanged") {
  const Grid g = bar(11);
  const Medium m = sample_medium(MediumSpec{}, g);
  const auto datum = bar_ramp(2.0, 0.5);
  const Evolution ev(g, m, datum, with(Backend::exhaustive1d));
  StepState s = ev.initial_state();
  for (EdgeId e = 0; e < g.num_crack_ids(); ++e) s.crack.insert(e, m);
  const auto next = ev.incremental_step(s, 3);
  CHECK(next.crack == s.crack);
  CHECK(next.solution.bulk_energy == 0.0);
}

TEST_CASE("perturbed state exposes the missing weak edge as witness") {
  const Grid g = bar(21);
  MediumSpec spec;
  spec.toughness.kind = FieldSpec::Kind::table;
  spec.toughness.table.assign(g.num_crack_ids(), 2.0);
  spec.toughness.table[7] = 0.5;
  const Medium m = sample_medium(spec, g);
  const auto datum = bar_ramp(1.0, 0.1);
  const Evolution ev(g, m, datum, with(Backend::exhaustive1d));
  const std::size_t i = 9;  // t = 0.9, t^2 > 0.5
  StepState s = ev.initial_state();
  s.solution = ev.solver().solve(s.crack, datum.values(i), nullptr, datum.rate(i));
  const auto rep = ev.verify_unilateral_minimality(s, i, 64, 1);
  CHECK(rep.exhaustive);
  CHECK_FALSE(rep.ok());
  REQUIRE(rep.witness.size() == 1);
  CHECK(rep.witness[0] == 7);
  CHECK(rep.worst_margin == doctest::Approx(0.5 - 0.81).epsilon(1e-10));

  // The step itself takes that edge and is then minimal.
  const auto next = ev.incremental_step(ev.initial_state(), i);
  CHECK(next.crack.ids()[0] == 7);
  CHECK(ev.verify_unilateral_minimality(next, i, 64, 1).ok());
}

TEST_CASE("superfluous crack is still unilaterally minimal") {
  const Grid g = bar(21);
  const Medium m = sample_medium(MediumSpec{}, g);
  const auto datum = bar_ramp(1.0, 0.1);
  const Evolution ev(g, m, datum, with(Backend::exhaustive1d));
  StepState s = ev.initial_state();
  s.crack.insert(3, m);
  s.solution = ev.solver().solve(s.crack, datum.values(5), nullptr, datum.rate(5));
  const auto rep = ev.verify_unilateral_minimality(s, 5, 64, 1);
  CHECK(rep.ok());
  CHECK(rep.worst_margin >= 0.0);
}

TEST_CASE("exhaustive 2D steps are unilaterally minimal on random media") {
  const Grid g = build_grid(2, {1.0, 1.0}, {5, 5}, {{Face::left, Face::right}, {}});
  std::vector<EdgeId> sites;
  for (int j = 0; j < 5; ++j) sites.push_back(g.x_edge(1, j));
  for (int j = 0; j < 5; ++j) sites.push_back(g.x_edge(2, j));
  for (int c = 1; c <= 2; ++c) sites.push_back(g.y_edge(c, 1)), sites.push_back(g.y_edge(c, 2));
  REQUIRE(sites.size() == 14);
  std::vector<double> profile;
  for (NodeId n : g.dirichlet_nodes()) profile.push_back(g.node_position(n)[0]);
  const auto datum = BoundaryDatum::ramp(BoundaryDatum::uniform_times(2.0, 0.25), profile);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  for (int it = 0; it < 5; ++it) {
    MediumSpec s;
    s.bulk.kind = FieldSpec::Kind::table;
    for (int c = 0; c < g.num_cells(); ++c) s.bulk.table.push_back(unif(rng));
    s.toughness.kind = FieldSpec::Kind::table;
    for (int e = 0; e < g.num_crack_ids(); ++e) s.toughness.table.push_back(unif(rng) * 0.4);
    const Medium m = sample_medium(s, g);
    auto opts = with(Backend::exhaustive2d, 2);
    opts.candidates = sites;
    opts.verify_each_step = true;
    const auto tr = Evolution(g, m, datum, opts).run();
    CHECK_FALSE(tr.steps.back().state.crack.empty());
  }
}

TEST_CASE("path backend follows a weak horizontal stripe") {
  const Grid g = build_grid(2, {1.0, 1.0}, {13, 13}, {{Face::bottom, Face::top}, {}});
  MediumSpec s;
  s.toughness = FieldSpec::layered(1, {2.0, 1.0, 2.0}, {0.5, 1.0 / 12.0, 5.0 / 12.0});
  const Medium m = sample_medium(s, g);
  std::vector<double> profile;
  for (NodeId n : g.dirichlet_nodes()) profile.push_back(g.node_position(n)[1]);
  const auto datum = BoundaryDatum::ramp(BoundaryDatum::uniform_times(1.4, 0.1), profile);
  const auto t0 = std::chrono::steady_clock::now();
  const Evolution ev(g, m, datum, with(Backend::path2d, 4));
  const auto tr = ev.run();
  MESSAGE("path2d run took " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s");
  const auto& last = tr.steps.back().state;
  CHECK(last.path_rows.size() == 13u);
  for (int r : last.path_rows) CHECK(r == 6);
  // The stripe cut spans the width: 11 interior edges of measure h and two
  // boundary edges of measure h/2, all of toughness 1.
  CHECK(last.crack.surface_energy() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.steps.back().energy.bulk == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev.verify_unilateral_minimality(last, tr.steps.size() - 1, 64, 3).ok());
}

TEST_CASE("crack time grows with toughness") {
  const Grid g = bar(51);
  const auto datum = bar_ramp(2.0, 0.01);
  double prev = 0.0;
  for (double k : {0.5, 1.0, 2.0, 3.0}) {
    MediumSpec s;
    s.toughness = FieldSpec::constant(k);
    const Medium m = sample_medium(s, g);
    const auto tr = Evolution(g, m, datum, with(Backend::exhaustive1d)).run();
    const std::size_t ic = first_crack_step(tr);
    REQUIRE(ic < tr.steps.size());
    const double tc = tr.steps[ic].t;
    CHECK(tc >= prev);
    CHECK(tc - std::sqrt(k) <= 0.01 + 1e-12);
    CHECK(tc > std::sqrt(k) - 1e-12);
    prev = tc;
  }
}

TEST_CASE("invariant checker reports violations with a witness") {
  const Grid g = bar(11);
  const Medium m = sample_medium(MediumSpec{}, g);
  const auto datum = bar_ramp(1.0, 0.5);
  const Evolution ev(g, m, datum, with(Backend::exhaustive1d));
  StepState a = ev.initial_state();
  a.crack.insert(4, m);
  a.solution = ev.solver().solve(a.crack, datum.values(1), nullptr, datum.rate(1));
  StepState b = ev.initial_state();
  b.solution = ev.solver().solve(b.crack, datum.values(2), nullptr, datum.rate(2));
  CHECK_THROWS_AS(ev.check_step_invariants(&a, b, 2), InvariantViolation);
  try {
    ev.check_step_invariants(&a, b, 2);
  } catch (const InvariantViolation& e) {
    CHECK(std::string(e.witness()).find("lost sites: 4") != std::string::npos);
  }
  StepState c = b;
  c.solution.u.values[0] = 0.25;
  CHECK_THROWS_AS(ev.check_step_invariants(nullptr, c, 2), InvariantViolation);
  CHECK_NOTHROW(ev.check_step_invariants(nullptr, b, 2));
}

TEST_CASE("traces are identical across worker counts") {
  const Grid g = bar(61);
  const Medium m = sample_medium(hetero_bar(), g);
  const auto datum = bar_ramp(1.2, 0.05);
  const auto a = Evolution(g, m, datum, with(Backend::generic1d, 1)).run();
  const auto b = Evolution(g, m, datum, with(Backend::generic1d, 4)).run();
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(crack_log_csv(a) == crack_log_csv(b));
  CHECK(trace_csv(a).rfind("# backend=generic1d\n", 0) == 0);
}

TEST_CASE("invalid configurations are rejected") {
  const Grid g1 = bar(11);
  const Grid g2 = build_grid(2, {1.0, 1.0}, {5, 5}, {{Face::left, Face::right}, {}});
  const Medium m1 = sample_medium(MediumSpec{}, g1);
  const Medium m2 = sample_medium(MediumSpec{}, g2);
  const auto d1 = bar_ramp(1.0, 0.5);
  CHECK_THROWS_AS(Evolution(g1, m1, d1, with(Backend::path2d)), ConfigError);
  CHECK_THROWS_AS(Evolution(g2, m2, d1, with(Backend::exhaustive2d)), ConfigError);
  CHECK_THROWS_AS(parse_backend("greedy"), ConfigError);
  CHECK(parse_backend("path2d") == Backend::path2d);
}
