#include "hfrac/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

#include "hfrac/cell.hpp"
#include "hfrac/config.hpp"
#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"
#include "hfrac/evolution.hpp"
#include "hfrac/mincut.hpp"
#include "hfrac/parallel.hpp"
#include "hfrac/sweep.hpp"

namespace hfrac {

namespace fs = std::filesystem;

namespace {

class Outputs {
 public:
  Outputs(fs::path dir, bool verbose, std::ostream& log) : dir_(std::move(dir)), verbose_(verbose), log_(log) {}

  void write(const std::string& name, const std::string& content) const {
    write_file_atomic(dir_ / name, content);
    if (verbose_) log_ << "wrote " << (dir_ / name).string() << "\n";
  }
  void note(const std::string& line) const {
    if (verbose_) log_ << line << "\n";
  }

 private:
  fs::path dir_;
  bool verbose_;
  std::ostream& log_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string balance_csv(const EvolutionTrace& tr, const EnergyBalance& b) {
  CsvTable t({"step", "t", "residual"});
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    t.row().add(static_cast<long>(i)).add(tr.steps[i].t).add(b.residual[i]);
  }
  return t.str();
}

std::string evolution_summary(const EvolutionTrace& tr, const EnergyBalance& b) {
  std::size_t first = tr.steps.size();
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    if (!tr.steps[i].state.crack.empty()) {
      first = i;
      break;
    }
  }
  std::ostringstream os;
  os << "backend=" << tr.backend << "\n"
     << "family=" << tr.family << "\n"
     << "steps=" << tr.steps.size() << "\n"
     << "delta=" << format_real(tr.delta) << "\n";
  if (first < tr.steps.size()) {
    os << "first_crack_step=" << first << "\n"
       << "first_crack_time=" << format_real(tr.steps[first].t) << "\n";
  } else {
    os << "first_crack_step=none\nfirst_crack_time=none\n";
  }
  const auto& last = tr.steps.empty() ? EnergyBreakdown{} : tr.steps.back().energy;
  os << "final_bulk_energy=" << format_real(last.bulk) << "\n"
     << "final_surface_energy=" << format_real(last.surface) << "\n"
     << "energy_balance_max_residual=" << format_real(b.max_abs) << "\n";
  return os.str();
}

EvolutionTrace run_evolution(const Config& cfg, const RunConfig& rc, const Grid& g, const Medium& m,
                             const BoundaryDatum& d, const Outputs& o, EvolutionOptions* used) {
  EvolutionOptions eo = cfg.evolution();
  eo.jobs = rc.jobs;
  if (rc.seed) eo.seed = *rc.seed;
  if (used) *used = eo;
  const Evolution ev(g, m, d, eo);
  o.note("evolution: " + backend_name(eo.backend) + ", " + std::to_string(d.num_steps()) + " steps");
  auto tr = ev.run();
  const auto bal = energy_balance_audit(tr);
  o.write("trace.csv", trace_csv(tr));
  o.write("crack_log.csv", crack_log_csv(tr));
  o.write("energy_balance.csv", balance_csv(tr, bal));
  o.write("summary.txt", evolution_summary(tr, bal));
  return tr;
}

void cmd_evolve(const Config& cfg, const RunConfig& rc, const Outputs& o) {
  const Grid g = cfg.grid();
  const Medium m = cfg.medium(g);
  const BoundaryDatum d = cfg.datum(g);
  run_evolution(cfg, rc, g, m, d, o, nullptr);
}

void cmd_verify(const Config& cfg, const RunConfig& rc, const Outputs& o) {
  const Grid g = cfg.grid();
  const Medium m = cfg.medium(g);
  const BoundaryDatum d = cfg.datum(g);
  VerifySettings vs = cfg.verify();
  if (rc.seed) vs.seed = *rc.seed;
  EvolutionOptions eo;
  const auto tr = run_evolution(cfg, rc, g, m, d, o, &eo);
  const Evolution ev(g, m, d, eo);
  std::vector<std::size_t> steps = vs.steps;
  if (steps.empty()) {
    for (std::size_t i = 0; i < tr.steps.size(); ++i) steps.push_back(i);
  }
  CsvTable t({"step", "t", "exhaustive", "challenges", "worst_margin", "violations"});
  std::string witness;
  for (std::size_t i : steps) {
    if (i >= tr.steps.size()) throw ConfigError("verify.steps: step " + std::to_string(i) + " out of range");
    const auto rep = ev.verify_unilateral_minimality(tr.steps[i].state, i, vs.budget, vs.seed + i);
    t.row()
        .add(static_cast<long>(i))
        .add(tr.steps[i].t)
        .add(rep.exhaustive ? "yes" : "no")
        .add(static_cast<long>(rep.challenges))
        .add(rep.worst_margin)
        .add(static_cast<long>(rep.violations));
    if (!rep.ok() && witness.empty()) {
      witness = "step: " + std::to_string(i) + "\ntime: " + format_real(tr.steps[i].t) + "\n" +
                rep.describe();
    }
  }
  o.write("minimality.csv", t.str());
  if (!witness.empty()) throw InvariantViolation("unilateral minimality violated", witness);
}

void cmd_cell(const Config& cfg, const RunConfig& rc, const Outputs& o) {
  const MediumSpec cell = cfg.medium_spec();
  CellSettings cs = cfg.cell();
  cs.table.jobs = rc.jobs;
  const auto table = build_effective_table(cell, cs.dimension, cs.table);
  o.write("effective_table.csv", effective_table_csv(table));
  const auto checks = check_effective_table(table, cell);
  std::string text = "checks=" + std::string(checks.ok() ? "pass" : "fail") + "\n";
  for (const auto& f : checks.failures) text += "failure=" + f + "\n";
  o.write("table_checks.txt", text);
  if (cs.scaling) {
    const auto [c1, c2] = *cs.scaling;
    std::vector<std::array<double, 2>> xis{{1.0, 0.0}};
    std::vector<LatticeDirection> nus{{1, 0}};
    if (cs.dimension == 2) {
      xis.push_back({0.0, 1.0});
      xis.push_back({0.6, 0.8});
      nus.push_back({0, 1});
      nus.push_back({1, 1});
    }
    const auto rep = scaling_check(c1, c2, cell, cs.dimension, cs.table.resolution, xis, nus, rc.jobs);
    CsvTable t({"kind", "component1", "component2", "base", "scaled", "expected", "relative_error"});
    for (const auto& r : rep.rows) {
      t.row().add(r.kind).add(r.sample[0]).add(r.sample[1]).add(r.base).add(r.scaled).add(r.expected).add(
          r.relative_error);
    }
    o.write("scaling.csv", t.str());
    if (!rep.passed()) throw InvariantViolation("scaling check failed", t.str());
  }
  if (!checks.ok()) throw InvariantViolation("effective table fails its bounds", text);
}

void cmd_sweep(const Config& cfg, const RunConfig& rc, const Outputs& o) {
  const MediumSpec cell = cfg.medium_spec();
  SweepSettings ss = cfg.sweep();
  ss.options.jobs = rc.jobs;
  EffectiveDensityTable table;
  if (ss.table) {
    table = read_effective_table(*ss.table);
  } else {
    TableOptions to;
    to.resolution = ss.options.table_resolution;
    to.power_family = true;
    to.jobs = rc.jobs;
    if (ss.options.dimension == 2) to.directions = 4;
    table = build_effective_table(cell, ss.options.dimension, to);
  }
  o.write("effective_table.csv", effective_table_csv(table));
  const auto rep = run_sweep(cell, table, ss.options);
  const auto lsc = lsc_checks(rep, ss.options.lsc_tolerance);
  CsvTable t({"t", "total_margin", "surface_margin", "pass"});
  for (const auto& r : lsc.rows) t.row().add(r.t).add(r.total_margin).add(r.surface_margin).add(yes_no(r.pass));
  o.write("sweep.csv", sweep_csv(rep));
  o.write("lsc.csv", t.str());
  o.write("sweep_verdict.txt", sweep_verdict_text(rep, lsc));
}

void cmd_probe(const Config& cfg, const RunConfig& rc, const Outputs& o) {
  const Grid g = cfg.grid();
  const Medium m = cfg.medium(g);
  const auto rq = cfg.probe();
  const auto reports = sigma_probe(g, m, rq, rc.jobs);
  o.write("sigma_probe.csv", sigma_probe_csv(reports));
  CsvTable t({"x", "y", "nu", "density", "threshold", "in_limit"});
  for (const auto& c : classify_sigma(reports, m.alpha())) {
    t.row()
        .add(c.center[0])
        .add(c.center[1])
        .add(c.nu_axis == 0 ? "e1" : "e2")
        .add(c.density)
        .add(sigma_threshold(m.alpha()))
        .add(yes_no(c.in_limit));
  }
  o.write("sigma_classification.csv", t.str());
}

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << "error: " << kind << "\nmessage: " << message << "\n";
}

// Best effort: the error itself is what gets reported if this fails.
void try_write(const RunConfig& rc, const std::string& name, const std::string& content) {
  try {
    fs::create_directories(rc.out);
    write_file_atomic(rc.out / name, content);
  } catch (...) {
  }
}

}  // namespace

int execute(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    if (rc.jobs < 1) throw ConfigError("--jobs must be >= 1");
    const Config cfg = Config::load(rc.config);
    std::error_code ec;
    fs::create_directories(rc.out, ec);
    if (ec || !fs::is_directory(rc.out)) {
      throw ConfigError("cannot create output directory '" + rc.out.string() + "'");
    }
    const Outputs o(rc.out, rc.verbose, out);
    if (rc.command == "evolve") {
      cmd_evolve(cfg, rc, o);
    } else if (rc.command == "verify") {
      cmd_verify(cfg, rc, o);
    } else if (rc.command == "cell") {
      cmd_cell(cfg, rc, o);
    } else if (rc.command == "sweep") {
      cmd_sweep(cfg, rc, o);
    } else if (rc.command == "sigma-probe") {
      cmd_probe(cfg, rc, o);
    } else {
      throw ConfigError("unknown command '" + rc.command + "'");
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    report(err, "config", e.what());
    return exit_config_error;
  } catch (const NumericalError& e) {
    report(err, "numerical", e.what());
    try_write(rc, "diagnostic.txt", std::string("message: ") + e.what() + "\n" + e.diagnostic());
    return exit_numerical_error;
  } catch (const InvariantViolation& e) {
    report(err, "invariant", e.what());
    try_write(rc, "witness.txt", std::string("message: ") + e.what() + "\n" + e.witness());
    return exit_invariant_violation;
  } catch (const std::exception& e) {
    // Anything else escaping the solvers is a numerical failure.
    report(err, "numerical", e.what());
    try_write(rc, "diagnostic.txt", std::string("message: ") + e.what() + "\n");
    return exit_numerical_error;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasistatic brittle fracture in heterogeneous media"};
  app.require_subcommand(1);
  RunConfig rc;
  rc.jobs = default_jobs();
  std::uint64_t seed = 0;
  for (const char* name : {"cell", "evolve", "sweep", "sigma-probe", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", rc.config, "Run description (YAML)")->required();
    sub->add_option("--out", rc.out, "Output directory")->required();
    sub->add_option("--jobs", rc.jobs, "Worker threads (1 = sequential)");
    sub->add_option("--seed", seed, "Seed for sampled checks");
    sub->add_flag("--verbose", rc.verbose, "Report progress and written files");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    report(err, "config", e.what());
    return exit_config_error;
  }
  auto* sub = app.get_subcommands().front();
  rc.command = sub->get_name();
  if (sub->count("--seed") > 0) rc.seed = seed;
  return execute(rc, out, err);
}

}  // namespace hfrac
