#include "hfrac/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"
#include "hfrac/parallel.hpp"

namespace hfrac {

namespace {

Grid sweep_grid(int dimension, int nodes) {
  if (dimension == 1) return build_grid(1, {1.0, 0.0}, {nodes, 1}, {{Face::left, Face::right}, {}});
  return build_grid(2, {1.0, 1.0}, {nodes, nodes}, {{Face::bottom, Face::top}, {}});
}

BoundaryDatum sweep_datum(const Grid& g, const SweepOptions& o) {
  const int axis = g.dimension() == 1 ? 0 : 1;
  std::vector<double> profile;
  for (NodeId n : g.dirichlet_nodes()) profile.push_back(g.node_position(n)[axis]);
  return BoundaryDatum::ramp(BoundaryDatum::uniform_times(o.t_end, o.dt), profile);
}

SweepCurve curve_of(const EvolutionTrace& tr, double eps) {
  SweepCurve c;
  c.epsilon = eps;
  c.crack_step = tr.steps.size();
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    c.energy.push_back(tr.steps[i].energy);
    if (c.crack_step == tr.steps.size() && !tr.steps[i].state.crack.empty()) c.crack_step = i;
  }
  return c;
}

double max_of(const SweepCurve& c, double (*part)(const EnergyBreakdown&)) {
  double m = 0.0;
  for (const auto& e : c.energy) m = std::max(m, part(e));
  return m;
}

double bulk_of(const EnergyBreakdown& e) { return e.bulk; }
double surface_of(const EnergyBreakdown& e) { return e.surface; }
double total_of(const EnergyBreakdown& e) { return e.total(); }

// Normaliser for a component; falls back to the total when it vanishes.
double scale_of(const SweepCurve& hom, double (*part)(const EnergyBreakdown&)) {
  const double s = max_of(hom, part);
  if (s > 0.0) return s;
  const double t = max_of(hom, total_of);
  return t > 0.0 ? t : 1.0;
}

double deviation_of(const SweepCurve& run, const SweepCurve& hom,
                    double (*part)(const EnergyBreakdown&)) {
  double m = 0.0;
  for (std::size_t i = 0; i < run.energy.size(); ++i) {
    m = std::max(m, std::abs(part(run.energy[i]) - part(hom.energy[i])));
  }
  return m / scale_of(hom, part);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + format_real(v[k]);
  return s;
}

}  // namespace

SweepVerdict convergence_verdict(const std::vector<Deviation>& dev, double tolerance) {
  SweepVerdict v;
  if (dev.empty()) return v;
  auto check = [&](double first, double last) {
    return last <= tolerance && last <= 0.5 * first + 1e-12;
  };
  v.total = check(dev.front().total, dev.back().total);
  v.bulk = check(dev.front().bulk, dev.back().bulk);
  v.surface = check(dev.front().surface, dev.back().surface);
  return v;
}

SweepReport run_sweep(const MediumSpec& cell, const EffectiveDensityTable& table,
                      const SweepOptions& o) {
  if (o.dimension != 1 && o.dimension != 2) throw ConfigError("sweep dimension must be 1 or 2");
  if (o.epsilons.empty()) throw ConfigError("sweep needs at least one epsilon");
  for (std::size_t k = 0; k < o.epsilons.size(); ++k) {
    if (!(o.epsilons[k] > 0.0)) throw ConfigError("sweep epsilons must be positive");
    if (k > 0 && !(o.epsilons[k] < o.epsilons[k - 1])) {
      throw ConfigError("sweep epsilons must be strictly decreasing");
    }
  }
  if (table.dimension != o.dimension) throw ConfigError("effective table dimension mismatch");
  if (table.p != cell.p) throw ConfigError("effective table exponent mismatch");
  const double eps_min = o.epsilons.back();
  const int nodes = o.nodes > 0 ? o.nodes : static_cast<int>(std::ceil(16.0 / eps_min - 1e-9)) + 1;
  const Grid g = sweep_grid(o.dimension, nodes);
  for (double eps : o.epsilons) {
    if (g.h() > eps / 8.0 * (1.0 + 1e-12)) {
      throw ConfigError("grid spacing h=" + format_real(g.h()) + " does not resolve epsilon=" +
                        format_real(eps) + " (need h <= epsilon/8)");
    }
  }
  const BoundaryDatum datum = sweep_datum(g, o);

  SweepReport rep;
  rep.dimension = o.dimension;
  rep.nodes = nodes;
  rep.tolerance = o.tolerance;
  for (double t : datum.times()) rep.times.push_back(t);

  // Homogenized medium: effective coefficients along the axes.
  MediumSpec hom;
  hom.p = cell.p;
  if (o.dimension == 1) {
    rep.a_hom = {table.f_hom({1.0, 0.0}), table.f_hom({1.0, 0.0})};
    rep.kappa_hom = {table.g_hom({1.0, 0.0}), table.g_hom({1.0, 0.0})};
  } else {
    rep.a_hom = {table.f_hom({1.0, 0.0}), table.f_hom({0.0, 1.0})};
    rep.kappa_hom = {table.g_hom({1.0, 0.0}), table.g_hom({0.0, 1.0})};
  }
  hom.bulk = FieldSpec::constant(rep.a_hom[0]);
  if (rep.a_hom[1] != rep.a_hom[0]) {
    if (cell.p != 2.0) {
      throw ConfigError("anisotropic homogenized bulk density is only supported for p = 2");
    }
    hom.bulk_y = FieldSpec::constant(rep.a_hom[1]);
  }
  hom.toughness = FieldSpec::constant(rep.kappa_hom[0]);
  if (rep.kappa_hom[1] != rep.kappa_hom[0]) hom.toughness_y = FieldSpec::constant(rep.kappa_hom[1]);

  EvolutionOptions eo;
  eo.backend = o.dimension == 1 ? Backend::exhaustive1d : Backend::path2d;
  eo.solver = o.solver;
  rep.backend = backend_name(eo.backend);

  // Index 0..n-1: epsilon runs; index n: homogenized run.
  const std::size_t n = o.epsilons.size();
  std::vector<SweepCurve> curves(n + 1);
  std::vector<std::string> families(n + 1);
  parallel_for(n + 1, o.jobs, [&](std::size_t k) {
    const Medium m = k < n ? sample_periodic(PeriodicMedium{cell, o.epsilons[k]}, g)
                           : sample_medium(hom, g);
    const Evolution ev(g, m, datum, eo);
    curves[k] = curve_of(ev.run(), k < n ? o.epsilons[k] : 0.0);
    families[k] = ev.family_description();
  });
  rep.family = families[n];
  rep.homogenized = std::move(curves[n]);
  curves.pop_back();
  rep.runs = std::move(curves);
  for (const auto& r : rep.runs) {
    rep.deviation.push_back({deviation_of(r, rep.homogenized, total_of),
                             deviation_of(r, rep.homogenized, bulk_of),
                             deviation_of(r, rep.homogenized, surface_of)});
  }
  rep.verdict = convergence_verdict(rep.deviation, o.tolerance);
  return rep;
}

SweepReport run_sweep(const MediumSpec& cell, const SweepOptions& o) {
  TableOptions to;
  to.resolution = o.table_resolution;
  to.power_family = true;
  to.jobs = o.jobs;
  to.solver = o.solver;
  if (o.dimension == 2) to.directions = 4;
  return run_sweep(cell, build_effective_table(cell, o.dimension, to), o);
}

bool LscReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const LscRow& r) { return r.pass; });
}

LscReport lsc_checks(const SweepReport& report, double tolerance) {
  LscReport out;
  out.tolerance = tolerance;
  const std::size_t n = report.runs.size();
  const std::size_t first = n / 2;  // finest half (the whole list when n == 1)
  const double s_total = scale_of(report.homogenized, total_of);
  const double s_surface = scale_of(report.homogenized, surface_of);
  out.worst_margin = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.times.size() && n > 0; ++i) {
    double min_total = std::numeric_limits<double>::infinity();
    double min_surface = std::numeric_limits<double>::infinity();
    for (std::size_t k = first; k < n; ++k) {
      min_total = std::min(min_total, report.runs[k].energy[i].total());
      min_surface = std::min(min_surface, report.runs[k].energy[i].surface);
    }
    const auto& h = report.homogenized.energy[i];
    LscRow row;
    row.t = report.times[i];
    row.total_margin = (min_total - h.total()) / s_total;
    row.surface_margin = (min_surface - h.surface) / s_surface;
    row.pass = row.total_margin >= -tolerance && row.surface_margin >= -tolerance;
    out.worst_margin = std::min({out.worst_margin, row.total_margin, row.surface_margin});
    out.rows.push_back(row);
  }
  return out;
}

std::string sweep_csv(const SweepReport& report) {
  CsvTable t({"epsilon", "t", "bulk", "surface", "total", "bulk_hom", "surface_hom", "total_hom",
              "dev_total"});
  for (const auto& r : report.runs) {
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      const auto& e = r.energy[i];
      const auto& h = report.homogenized.energy[i];
      t.row()
          .add(r.epsilon)
          .add(report.times[i])
          .add(e.bulk)
          .add(e.surface)
          .add(e.total())
          .add(h.bulk)
          .add(h.surface)
          .add(h.total())
          .add(std::abs(e.total() - h.total()));
    }
  }
  return t.str();
}

std::string sweep_verdict_text(const SweepReport& report, const LscReport& lsc) {
  std::vector<double> eps, dt, db, ds;
  for (std::size_t k = 0; k < report.runs.size(); ++k) {
    eps.push_back(report.runs[k].epsilon);
    dt.push_back(report.deviation[k].total);
    db.push_back(report.deviation[k].bulk);
    ds.push_back(report.deviation[k].surface);
  }
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::ostringstream os;
  os << "dimension=" << report.dimension << "\n"
     << "backend=" << report.backend << "\n"
     << "family=" << report.family << "\n"
     << "nodes_per_axis=" << report.nodes << "\n"
     << "epsilons=" << join(eps) << "\n"
     << "a_hom=" << join({report.a_hom[0], report.a_hom[1]}) << "\n"
     << "kappa_hom=" << join({report.kappa_hom[0], report.kappa_hom[1]}) << "\n"
     << "dev_total=" << join(dt) << "\n"
     << "dev_bulk=" << join(db) << "\n"
     << "dev_surface=" << join(ds) << "\n"
     << "tolerance=" << format_real(report.tolerance) << "\n"
     << "converged_total=" << yn(report.verdict.total) << "\n"
     << "converged_bulk=" << yn(report.verdict.bulk) << "\n"
     << "converged_surface=" << yn(report.verdict.surface) << "\n"
     << "lsc_tolerance=" << format_real(lsc.tolerance) << "\n"
     << "lsc_worst_margin=" << format_real(lsc.worst_margin) << "\n"
     << "lsc_pass=" << yn(lsc.ok()) << "\n";
  if (report.dimension == 2) {
    os << "caveat=crack family restricted to " << report.family << "\n";
  }
  return os.str();
}

}  // namespace hfrac
