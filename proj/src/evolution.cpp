#include "hfrac/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"
#include "hfrac/parallel.hpp"

namespace hfrac {

Backend parse_backend(const std::string& name) {
  if (name == "exhaustive1d") return Backend::exhaustive1d;
  if (name == "generic1d") return Backend::generic1d;
  if (name == "exhaustive2d") return Backend::exhaustive2d;
  if (name == "path2d") return Backend::path2d;
  throw ConfigError("unknown evolution backend '" + name + "'");
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::exhaustive1d: return "exhaustive1d";
    case Backend::generic1d: return "generic1d";
    case Backend::exhaustive2d: return "exhaustive2d";
    case Backend::path2d: return "path2d";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxExhaustiveSites = 14;
constexpr std::size_t kBatch = 32;

std::string ids_text(const std::vector<EdgeId>& ids) {
  std::ostringstream os;
  for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? " " : "") << ids[k];
  return os.str();
}

bool is_1d(Backend b) { return b == Backend::exhaustive1d || b == Backend::generic1d; }

}  // namespace

std::string MinimalityReport::describe() const {
  std::ostringstream os;
  os << "exhaustive: " << (exhaustive ? "yes" : "no") << "\nchallenges: " << challenges
     << "\nviolations: " << violations << "\nworst margin: " << format_real(worst_margin)
     << "\nwitness added sites: " << ids_text(witness)
     << "\nwitness bulk energy: " << format_real(witness_bulk)
     << "\nwitness added surface energy: " << format_real(witness_surface) << "\n";
  return os.str();
}

Evolution::Evolution(const Grid& grid, const Medium& medium, const BoundaryDatum& datum,
                     EvolutionOptions options)
    : grid_(&grid),
      medium_(&medium),
      datum_(&datum),
      options_(std::move(options)),
      solver_(grid, medium, options_.solver) {
  if (!(medium.p() > 1.0)) throw ConfigError("evolutions need p > 1");
  if (datum.num_nodes() != static_cast<std::size_t>(grid.num_dirichlet())) {
    throw ConfigError("boundary datum has " + std::to_string(datum.num_nodes()) +
                      " node values but the grid has " + std::to_string(grid.num_dirichlet()) +
                      " Dirichlet nodes");
  }
  const bool one_d = is_1d(options_.backend);
  if (one_d != (grid.dimension() == 1)) {
    throw ConfigError("backend " + backend_name(options_.backend) + " does not apply to a " +
                      std::to_string(grid.dimension()) + "D grid");
  }
  if (options_.backend == Backend::exhaustive2d) {
    auto sites = options_.candidates;
    if (sites.empty()) {
      for (EdgeId e = 0; e < grid.num_crack_ids(); ++e) sites.push_back(e);
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    if (sites.size() > kMaxExhaustiveSites) {
      throw ConfigError("exhaustive2d handles at most 14 candidate sites, got " +
                        std::to_string(sites.size()));
    }
    for (EdgeId e : sites) {
      if (e < 0 || e >= grid.num_crack_ids()) throw ConfigError("candidate site out of range");
    }
    exhaustive_sites_ = std::move(sites);
  }
}

std::string Evolution::family_description() const {
  switch (options_.backend) {
    case Backend::exhaustive1d: return "K plus up to two new crack sites";
    case Backend::generic1d: return "K plus up to one new crack site";
    case Backend::exhaustive2d:
      return "K plus any subset of " + std::to_string(exhaustive_sites_.size()) +
             " candidate sites";
    case Backend::path2d:
      return "x-monotone dual paths from the left side; cheapest extension per length and end row";
  }
  return "?";
}

StepState Evolution::initial_state() const {
  StepState s;
  s.crack = CrackState(*grid_);
  return s;
}

double Evolution::closed_form_bulk(const CrackState& crack, const std::vector<double>& datum) const {
  const Grid& g = *grid_;
  if (g.num_dirichlet() < 2 || !crack.empty()) return 0.0;
  const double p = medium_->p();
  double s = 0.0;
  for (double a : medium_->bulk()) s += g.h() * std::pow(a, -1.0 / (p - 1.0));
  return std::pow(std::abs(datum[1] - datum[0]), p) / std::pow(s, p - 1.0);
}

double Evolution::candidate_bulk(const CrackState& crack, const std::vector<double>& datum) const {
  if (options_.backend == Backend::exhaustive1d) return closed_form_bulk(crack, datum);
  return solver_.optimal_bulk_energy(crack, datum);
}

std::vector<Evolution::Candidate> Evolution::path_candidates(const StepState& prev, bool random,
                                                             int budget,
                                                             std::uint64_t seed) const {
  const Grid& g = *grid_;
  const CrackState& K = prev.crack;
  const int nx = g.nx();
  const int rows = g.ny() - 1;  // rows of vertical edges
  const int L = static_cast<int>(prev.path_rows.size());
  std::vector<Candidate> out;
  if (L >= nx) return out;

  auto w = [&](EdgeId e) { return K.contains(e) ? 0.0 : medium_->surface_weight(e); };
  // prefix[c][j] = sum of x-edge weights (c, j') for j' < j
  std::vector<std::vector<double>> prefix(nx - 1, std::vector<double>(g.ny() + 1, 0.0));
  for (int c = 0; c + 1 < nx; ++c) {
    for (int j = 0; j < g.ny(); ++j) prefix[c][j + 1] = prefix[c][j] + w(g.x_edge(c, j));
  }
  // Crossing from row r1 to r2 at the dual column right of node column c.
  auto vert = [&](int c, int r1, int r2) {
    const int lo = std::min(r1, r2), hi = std::max(r1, r2);
    return prefix[c][hi + 1] - prefix[c][lo + 1];
  };
  auto materialize = [&](const std::vector<int>& ext) {
    Candidate cand;
    int last = L > 0 ? prev.path_rows.back() : -1;
    for (std::size_t k = 0; k < ext.size(); ++k) {
      const int c = L + static_cast<int>(k);
      const int r = ext[k];
      if (last >= 0) {
        for (int j = std::min(last, r) + 1; j <= std::max(last, r); ++j) cand.added.push_back(g.x_edge(c - 1, j));
      }
      cand.added.push_back(g.y_edge(c, r));
      last = r;
    }
    std::sort(cand.added.begin(), cand.added.end());
    cand.added.erase(std::remove_if(cand.added.begin(), cand.added.end(),
                                    [&](EdgeId e) { return K.contains(e); }),
                     cand.added.end());
    for (EdgeId e : cand.added) cand.added_surface += medium_->surface_weight(e);
    cand.path_rows = prev.path_rows;
    cand.path_rows.insert(cand.path_rows.end(), ext.begin(), ext.end());
    return cand;
  };

  if (random) {
    std::mt19937_64 rng(seed);
    for (int b = 0; b < budget; ++b) {
      const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(nx - L));
      std::vector<int> ext;
      int r = L > 0 ? prev.path_rows.back() : static_cast<int>(rng() % rows);
      for (int k = 0; k < len; ++k) {
        if (k > 0 || L > 0) r = std::clamp(r + static_cast<int>(rng() % 3) - 1, 0, rows - 1);
        ext.push_back(r);
      }
      out.push_back(materialize(ext));
    }
    return out;
  }

  const double inf = std::numeric_limits<double>::infinity();
  const int span = nx - L;
  std::vector<std::vector<double>> best(span, std::vector<double>(rows, inf));
  std::vector<std::vector<int>> from(span, std::vector<int>(rows, -1));
  for (int r = 0; r < rows; ++r) {
    best[0][r] = (L > 0 ? vert(L - 1, prev.path_rows.back(), r) : 0.0) + w(g.y_edge(L, r));
  }
  for (int k = 1; k < span; ++k) {
    const int c = L + k;
    for (int r = 0; r < rows; ++r) {
      double b = inf;
      int arg = -1;
      for (int r0 = 0; r0 < rows; ++r0) {
        const double v = best[k - 1][r0] + vert(c - 1, r0, r);
        const bool better = v < b || (v == b && arg >= 0 &&
                                      (std::abs(r0 - r) < std::abs(arg - r) ||
                                       (std::abs(r0 - r) == std::abs(arg - r) && r0 < arg)));
        if (better) {
          b = v;
          arg = r0;
        }
      }
      best[k][r] = b + w(g.y_edge(c, r));
      from[k][r] = arg;
    }
  }
  for (int k = 0; k < span; ++k) {
    for (int r = 0; r < rows; ++r) {
      std::vector<int> ext(k + 1);
      int cur = r;
      for (int q = k; q >= 0; --q) {
        ext[q] = cur;
        cur = from[q][cur];
      }
      out.push_back(materialize(ext));
    }
  }
  return out;
}

std::vector<Evolution::Candidate> Evolution::candidates(const StepState& prev, std::size_t) const {
  const Grid& g = *grid_;
  const CrackState& K = prev.crack;
  std::vector<Candidate> out;
  Candidate stay;
  stay.path_rows = prev.path_rows;
  out.push_back(stay);
  auto single = [&](EdgeId e) {
    Candidate c;
    c.added = {e};
    c.added_surface = medium_->surface_weight(e);
    return c;
  };
  switch (options_.backend) {
    case Backend::exhaustive1d:
    case Backend::generic1d: {
      std::vector<EdgeId> free_sites;
      for (EdgeId e = 0; e < g.num_crack_ids(); ++e) {
        if (!K.contains(e)) free_sites.push_back(e);
      }
      for (EdgeId e : free_sites) out.push_back(single(e));
      if (options_.backend == Backend::exhaustive1d && free_sites.size() >= 2) {
        // The cheapest pair; any other pair costs at least as much.
        auto key = [&](EdgeId e) {
          return std::make_tuple(medium_->surface_weight(e), g.measure(e), e);
        };
        std::vector<EdgeId> sorted = free_sites;
        std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(),
                          [&](EdgeId a, EdgeId b) { return key(a) < key(b); });
        Candidate pair;
        pair.added = {std::min(sorted[0], sorted[1]), std::max(sorted[0], sorted[1])};
        pair.added_surface = medium_->surface_weight(sorted[0]) + medium_->surface_weight(sorted[1]);
        out.push_back(pair);
      }
      break;
    }
    case Backend::exhaustive2d: {
      std::vector<EdgeId> rest;
      for (EdgeId e : exhaustive_sites_) {
        if (!K.contains(e)) rest.push_back(e);
      }
      for (std::uint32_t mask = 1; mask < (1u << rest.size()); ++mask) {
        Candidate c;
        for (std::size_t k = 0; k < rest.size(); ++k) {
          if (mask & (1u << k)) {
            c.added.push_back(rest[k]);
            c.added_surface += medium_->surface_weight(rest[k]);
          }
        }
        out.push_back(std::move(c));
      }
      break;
    }
    case Backend::path2d: {
      auto ext = path_candidates(prev, false, 0, 0);
      for (auto& c : ext) out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

StepState Evolution::incremental_step(const StepState& prev, std::size_t i) const {
  const auto datum = datum_->values(i);
  const auto cands = candidates(prev, i);
  const double base_surface = prev.crack.surface_energy();

  // Evaluate in order of the surface lower bound so candidates whose added
  // surface alone exceeds the best total can be skipped.
  std::vector<std::size_t> order(cands.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].added_surface < cands[b].added_surface;
  });

  struct Eval {
    bool done = false;
    double total = 0.0;
    double measure = 0.0;
    CrackState crack;
  };
  std::vector<Eval> ev(cands.size());
  const double tol = options_.tie_tolerance;
  auto better = [&](const Eval& a, const Eval& b) {
    const double scale = std::max(std::abs(a.total), std::abs(b.total));
    if (a.total < b.total - tol * scale) return true;
    if (a.total > b.total + tol * scale) return false;
    const double ms = std::max(a.measure, b.measure);
    if (a.measure < b.measure - 1e-12 * ms) return true;
    if (a.measure > b.measure + 1e-12 * ms) return false;
    const auto ia = a.crack.ids();
    const auto ib = b.crack.ids();
    return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
  };

  int best = -1;
  for (std::size_t start = 0; start < order.size(); start += kBatch) {
    const std::size_t stop = std::min(order.size(), start + kBatch);
    const double bound =
        best < 0 ? std::numeric_limits<double>::infinity()
                 : ev[best].total + 2.0 * tol * std::abs(ev[best].total) + 1e-300;
    if (base_surface + cands[order[start]].added_surface > bound) break;
    parallel_for(stop - start, options_.jobs, [&](std::size_t q) {
      const std::size_t k = order[start + q];
      if (base_surface + cands[k].added_surface > bound) return;
      Eval e;
      e.crack = prev.crack;
      e.crack.insert(cands[k].added, *medium_);
      e.total = candidate_bulk(e.crack, datum) + e.crack.surface_energy();
      e.measure = e.crack.measure(*grid_);
      e.done = true;
      ev[k] = std::move(e);
    });
    for (std::size_t q = start; q < stop; ++q) {
      const std::size_t k = order[q];
      if (ev[k].done && (best < 0 || better(ev[k], ev[best]))) best = static_cast<int>(k);
    }
  }

  StepState next;
  next.crack = ev[best].crack;
  next.path_rows = cands[best].path_rows;
  const ScalarField* previous = prev.solution.u.values.empty() ? nullptr : &prev.solution.u;
  next.solution = solver_.solve(next.crack, datum, previous, datum_->rate(i));
  return next;
}

void Evolution::check_step_invariants(const StepState* prev, const StepState& cur,
                                      std::size_t i) const {
  const Grid& g = *grid_;
  const auto datum = datum_->values(i);
  auto fail = [&](const std::string& what, const std::string& detail) {
    std::ostringstream os;
    os << "step: " << i << "\ntime: " << format_real(datum_->times()[i]) << "\ninvariant: " << what
       << "\n" << detail;
    throw InvariantViolation(what + " violated at step " + std::to_string(i), os.str());
  };
  const CrackState& K = cur.crack;
  if (prev) {
    if (!prev->crack.subset_of(K)) {
      fail("irreversibility", "lost sites: " + ids_text(prev->crack.difference(K)) + "\n");
    }
    if (K.surface_energy() < prev->crack.surface_energy() * (1.0 - 1e-12)) {
      fail("surface energy monotonicity", "surface energy decreased\n");
    }
  }
  const double recomputed = K.recompute_surface_energy(*medium_);
  if (std::abs(recomputed - K.surface_energy()) > 1e-12 * std::max(1.0, recomputed)) {
    fail("cached surface energy", "cached " + format_real(K.surface_energy()) + " recomputed " +
                                      format_real(recomputed) + "\n");
  }
  const auto& u = cur.solution.u;
  if (!std::equal(u.open.begin(), u.open.end(), K.ids().begin(), K.ids().end())) {
    fail("admissibility", "jump set of u is not the crack\n");
  }
  for (int k = 0; k < g.num_dirichlet(); ++k) {
    const NodeId n = g.dirichlet_nodes()[k];
    if (!K.contains(g.ghost_edge(k)) && u.values[n] != datum[k]) {
      fail("admissibility", "node " + std::to_string(n) + " has u = " + format_real(u.values[n]) +
                                " but psi = " + format_real(datum[k]) + " and is not released\n");
    }
  }
  double sup = 0.0;
  for (double v : datum) sup = std::max(sup, std::abs(v));
  if (u.sup_norm() > sup) {
    fail("sup-norm bound", "|u|_inf = " + format_real(u.sup_norm()) + " > |psi|_inf = " +
                               format_real(sup) + "\n");
  }
  if (prev) {
    const double now = candidate_bulk(K, datum);
    const double before = candidate_bulk(prev->crack, datum);
    if (now > before * (1.0 + 1e-10) + 1e-14) {
      fail("crack enlargement comparison",
           "optimal bulk energy " + format_real(now) + " with the new crack exceeds " +
               format_real(before) + " with the previous crack\n");
    }
  }
}

EvolutionTrace Evolution::run() const {
  EvolutionTrace trace;
  trace.backend = backend_name(options_.backend);
  trace.family = family_description();
  trace.delta = datum_->max_step();
  StepState state = initial_state();
  double work = 0.0;
  const auto times = datum_->times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    StepState next = incremental_step(state, i);
    if (options_.check_invariants) check_step_invariants(i == 0 ? nullptr : &state, next, i);
    if (options_.verify_each_step) {
      const auto rep = verify_unilateral_minimality(next, i, options_.verify_budget,
                                                    options_.seed + i);
      if (!rep.ok()) {
        throw InvariantViolation("unilateral minimality violated at step " + std::to_string(i),
                                 "step: " + std::to_string(i) + "\n" + rep.describe());
      }
    }
    StepRecord rec;
    rec.t = times[i];
    rec.energy = {next.solution.bulk_energy, next.crack.surface_energy()};
    rec.theta = next.solution.theta;
    if (i > 0) work += rec.theta * (times[i] - times[i - 1]);
    rec.cumulative_work = work;
    rec.state = next;
    trace.steps.push_back(std::move(rec));
    state = std::move(next);
  }
  return trace;
}

MinimalityReport Evolution::verify_unilateral_minimality(const StepState& state, std::size_t i,
                                                         int budget, std::uint64_t seed) const {
  const Grid& g = *grid_;
  const CrackState& K = state.crack;
  const auto datum = datum_->values(i);
  MinimalityReport rep;
  std::vector<std::vector<EdgeId>> family{{}};

  switch (options_.backend) {
    case Backend::exhaustive2d: {
      rep.exhaustive = true;
      std::vector<EdgeId> rest;
      for (EdgeId e : exhaustive_sites_) {
        if (!K.contains(e)) rest.push_back(e);
      }
      for (std::uint32_t mask = 1; mask < (1u << rest.size()); ++mask) {
        std::vector<EdgeId> s;
        for (std::size_t k = 0; k < rest.size(); ++k) {
          if (mask & (1u << k)) s.push_back(rest[k]);
        }
        family.push_back(std::move(s));
      }
      break;
    }
    case Backend::exhaustive1d:
    case Backend::generic1d: {
      std::vector<EdgeId> free_sites;
      for (EdgeId e = 0; e < g.num_crack_ids(); ++e) {
        if (!K.contains(e)) free_sites.push_back(e);
      }
      const std::size_t n = free_sites.size();
      const bool pairs = options_.backend == Backend::exhaustive1d;
      const std::size_t full = n + (pairs ? n * (n - 1) / 2 : 0);
      for (EdgeId e : free_sites) family.push_back({e});
      if (pairs && full <= (std::size_t{1} << kMaxExhaustiveSites)) {
        rep.exhaustive = true;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) family.push_back({free_sites[a], free_sites[b]});
        }
      } else if (pairs && n >= 2) {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < budget; ++k) {
          const std::size_t a = rng() % n;
          std::size_t b = rng() % (n - 1);
          if (b >= a) ++b;
          family.push_back({free_sites[std::min(a, b)], free_sites[std::max(a, b)]});
        }
      } else {
        rep.exhaustive = true;
      }
      break;
    }
    case Backend::path2d: {
      for (auto& c : path_candidates(state, false, 0, 0)) family.push_back(std::move(c.added));
      for (auto& c : path_candidates(state, true, budget, seed)) family.push_back(std::move(c.added));
      break;
    }
  }

  const double eu = solver_.bulk_energy(state.solution.u.values, K);
  struct Eval {
    bool done = false;
    double bulk = 0.0;
    double surface = 0.0;
  };
  std::vector<Eval> ev(family.size());
  parallel_for(family.size(), options_.jobs, [&](std::size_t k) {
    Eval e;
    for (EdgeId id : family[k]) e.surface += medium_->surface_weight(id);
    // Challenges whose new surface alone exceeds E_b(u) cannot win.
    if (e.surface > eu) {
      ev[k] = e;
      return;
    }
    CrackState H = K;
    H.insert(family[k], *medium_);
    e.bulk = solver_.optimal_bulk_energy(H, datum);
    e.done = true;
    ev[k] = e;
  });
  rep.challenges = family.size();
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-10 * std::max(1.0, eu);
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!ev[k].done) continue;
    const double margin = ev[k].bulk + ev[k].surface - eu;
    if (margin < -tol) ++rep.violations;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.witness = family[k];
      rep.witness_bulk = ev[k].bulk;
      rep.witness_surface = ev[k].surface;
    }
  }
  return rep;
}

EnergyBalance energy_balance_audit(const EvolutionTrace& trace) {
  EnergyBalance b;
  b.delta = trace.delta;
  if (trace.steps.empty()) return b;
  const double e0 = trace.steps.front().energy.total();
  for (const auto& s : trace.steps) {
    const double r = s.energy.total() - e0 - s.cumulative_work;
    b.residual.push_back(r);
    b.max_abs = std::max(b.max_abs, std::abs(r));
  }
  return b;
}

namespace {

std::string trace_header(const EvolutionTrace& trace) {
  return "# backend=" + trace.backend + "\n# family=" + trace.family +
         "\n# delta=" + format_real(trace.delta) + "\n";
}

}  // namespace

std::string trace_csv(const EvolutionTrace& trace) {
  CsvTable t({"step", "t", "bulk", "surface", "total", "theta", "cumulative_work",
              "n_cracked_edges"});
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    t.row()
        .add(static_cast<long>(i))
        .add(s.t)
        .add(s.energy.bulk)
        .add(s.energy.surface)
        .add(s.energy.total())
        .add(s.theta)
        .add(s.cumulative_work)
        .add(static_cast<long>(s.state.crack.size()));
  }
  return trace_header(trace) + t.str();
}

std::string crack_log_csv(const EvolutionTrace& trace) {
  CsvTable t({"step", "edge"});
  const CrackState* prev = nullptr;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const CrackState& K = trace.steps[i].state.crack;
    const std::vector<EdgeId> added =
        prev ? K.difference(*prev) : std::vector<EdgeId>(K.ids().begin(), K.ids().end());
    for (EdgeId e : added) t.row().add(static_cast<long>(i)).add(static_cast<long>(e));
    prev = &K;
  }
  return trace_header(trace) + t.str();
}

}  // namespace hfrac
