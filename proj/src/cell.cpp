#include "hfrac/cell.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"
#include "hfrac/mincut.hpp"
#include "hfrac/parallel.hpp"

namespace hfrac {

namespace {

void check_resolution(int r) {
  if (r < 16) throw ConfigError("cell resolution must be at least 16 per axis");
}

int floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return static_cast<int>(q);
}

}  // namespace

double f_hom_cell(const MediumSpec& cell, int dimension, std::array<double, 2> xi, int R,
                  const ConvexSolveOptions& options) {
  check_resolution(R);
  if (dimension != 1 && dimension != 2) throw ConfigError("cell dimension must be 1 or 2");
  if (!std::isfinite(xi[0]) || !std::isfinite(xi[1])) throw ConfigError("xi must be finite");
  const double p = cell.p;
  if (p != 2.0 && cell.bulk_y) throw ConfigError("axis-anisotropic bulk coefficients require p = 2");
  const double h = 1.0 / R;
  LatticeEnergy en;
  en.p = p;
  if (dimension == 1) {
    en.num_nodes = R;
    for (int k = 0; k < R; ++k) {
      en.lo.push_back(k);
      en.hi.push_back((k + 1) % R);
      en.offset.push_back(xi[0] * h);
      const double w = cell.bulk.evaluate({(k + 0.5) * h, 0.0}, k) * h * std::pow(h, -p);
      en.term_diff.push_back({k, -1});
      en.term_weight.push_back({w, w});
    }
  } else {
    en.num_nodes = R * R;
    auto node = [R](int i, int j) { return (j % R) * R + (i % R); };
    for (int j = 0; j < R; ++j) {
      for (int i = 0; i < R; ++i) {
        en.lo.push_back(node(i, j));
        en.hi.push_back(node(i + 1, j));
        en.offset.push_back(xi[0] * h);
      }
    }
    for (int j = 0; j < R; ++j) {
      for (int i = 0; i < R; ++i) {
        en.lo.push_back(node(i, j));
        en.hi.push_back(node(i, j + 1));
        en.offset.push_back(xi[1] * h);
      }
    }
    const int ny0 = R * R;
    const double scale = 0.25 * h * h * std::pow(h, -p);
    for (int j = 0; j < R; ++j) {
      for (int i = 0; i < R; ++i) {
        const int c = j * R + i;
        const std::array<double, 2> y{(i + 0.5) * h, (j + 0.5) * h};
        const double wx = cell.bulk_for(0).evaluate(y, c) * scale;
        const double wy = cell.bulk_for(1).evaluate(y, c) * scale;
        for (int xe : {j * R + i, ((j + 1) % R) * R + i}) {
          for (int ye : {ny0 + j * R + i, ny0 + j * R + (i + 1) % R}) {
            en.term_diff.push_back({xe, ye});
            en.term_weight.push_back({wx, wy});
          }
        }
      }
    }
  }
  for (const auto& w : en.term_weight) {
    if (!(w[0] > 0.0) || !(w[1] > 0.0)) throw ConfigError("bulk coefficients must be positive");
  }
  std::vector<std::uint8_t> disabled(en.lo.size(), 0);
  std::vector<std::uint8_t> fixed(en.num_nodes, 0);
  fixed[0] = 1;
  const auto res =
      minimize_lattice_energy(en, disabled, fixed, std::vector<double>(en.num_nodes, 0.0), options);
  return res.energy;  // the cell has unit volume
}

std::array<double, 2> LatticeDirection::unit() const {
  const double n = std::hypot(static_cast<double>(n1), static_cast<double>(n2));
  return {n1 / n, n2 / n};
}

LatticeDirection lattice_direction(double phi) {
  LatticeDirection best;
  double best_err = 1e300;
  for (int a = -8; a <= 8; ++a) {
    for (int b = -8; b <= 8; ++b) {
      if ((a == 0 && b == 0) || std::gcd(a, b) != 1) continue;
      // Directions are unoriented: compare modulo pi.
      double d = std::remainder(std::atan2(b, a) - phi, std::numbers::pi);
      d = std::abs(d);
      const int l1 = std::abs(a) + std::abs(b);
      if (d < best_err - 1e-12 || (std::abs(d - best_err) <= 1e-12 && l1 < best.l1())) {
        best_err = d;
        best = {a, b};
      }
    }
  }
  // Canonical orientation: n2 > 0, or n2 == 0 and n1 > 0.
  if (best.n2 < 0 || (best.n2 == 0 && best.n1 < 0)) best = {-best.n1, -best.n2};
  return best;
}

double g_hom_cell(const MediumSpec& cell_in, int dimension, LatticeDirection nu, int R, int m) {
  check_resolution(R);
  if (m < 1) throw ConfigError("strip width must be at least one cell");
  if (dimension == 1) {
    double best = 1e300;
    for (int k = 0; k < R; ++k) best = std::min(best, cell_in.toughness.evaluate({(k + 0.5) / R, 0.0}, k));
    return best;
  }
  if (dimension != 2) throw ConfigError("cell dimension must be 1 or 2");
  int n1 = nu.n1;
  int n2 = nu.n2;
  if ((n1 == 0 && n2 == 0) || std::max(std::abs(n1), std::abs(n2)) > 8) {
    throw ConfigError("g_hom direction needs a nonzero integer normal with entries in [-8, 8]");
  }
  const int g = std::gcd(n1, n2);
  n1 /= g;
  n2 /= g;
  MediumSpec cell = cell_in;
  if (std::abs(n1) > std::abs(n2)) {
    cell = cell_in.transposed();
    std::swap(n1, n2);
  }
  if (n2 < 0) {
    n1 = -n1;
    n2 = -n2;
  }
  const double h = 1.0 / R;
  const int P = n2 * R;       // columns per period of the sheared strip
  const int M = (m * R + 1) / 2;
  const int rows = 2 * M + 1;
  auto j_off = [&](int i) { return floor_div(-static_cast<long>(n1) * i, n2); };
  auto id = [&](int i, int k) { return (i % P) * rows + (k + M); };
  auto frac = [](double s) { return s - std::floor(s); };
  auto kappa = [&](int axis, double x, double y) {
    return cell.toughness_for(axis).evaluate({frac(x), frac(y)}, -1);
  };

  CutProblem pb;
  pb.num_nodes = P * rows;
  for (int i = 0; i < P; ++i) {
    const int ji = j_off(i);
    for (int k = -M; k < M; ++k) {
      pb.lo.push_back(id(i, k));
      pb.hi.push_back(id(i, k + 1));
      pb.weight.push_back(kappa(1, i * h, (ji + k + 0.5) * h) * h);
    }
    const int shift = ji - j_off(i + 1);
    for (int k = -M; k <= M; ++k) {
      const double w = kappa(0, (i + 0.5) * h, (ji + k) * h) * h;
      const int k2 = k + shift;
      if (k2 >= -M && k2 <= M) {
        pb.lo.push_back(id(i, k));
        pb.hi.push_back(id(i + 1, k2));
        pb.weight.push_back(w);
      } else {
        pb.seams.push_back({id(i, k), w, k2 > M});
      }
    }
    // Edges whose left end lies outside the strip.
    for (int k2 = -M; k2 <= M; ++k2) {
      const int k = k2 - shift;
      if (k >= -M && k <= M) continue;
      pb.seams.push_back({id(i + 1, k2), kappa(0, (i + 0.5) * h, (ji + k) * h) * h, k > M});
    }
    pb.sources.push_back(id(i, M));
    pb.sinks.push_back(id(i, -M));
  }
  const auto res = min_cut(pb);
  return res.cost / (std::abs(n1) + std::abs(n2));
}

double EffectiveDensityTable::f_hom(std::array<double, 2> xi) const {
  for (const auto& b : bulk) {
    if (std::abs(b.xi[0] - xi[0]) < 1e-12 && std::abs(b.xi[1] - xi[1]) < 1e-12) return b.value;
  }
  throw ConfigError("effective table has no bulk sample at the requested xi");
}

double EffectiveDensityTable::g_hom(std::array<double, 2> nu) const {
  for (const auto& s : surface) {
    if (std::abs(s.nu[0] - nu[0]) < 1e-9 && std::abs(s.nu[1] - nu[1]) < 1e-9) return s.value;
    if (std::abs(s.nu[0] + nu[0]) < 1e-9 && std::abs(s.nu[1] + nu[1]) < 1e-9) return s.value;
  }
  throw ConfigError("effective table has no surface sample at the requested direction");
}

EffectiveDensityTable build_effective_table(const MediumSpec& cell, int dimension,
                                            const TableOptions& opt) {
  check_resolution(opt.resolution);
  const int R = opt.resolution;
  const int coarse = std::max(16, R / 2);
  EffectiveDensityTable t;
  t.dimension = dimension;
  t.resolution = R;
  t.p = cell.p;

  std::vector<std::array<double, 2>> xis;
  const std::vector<double> mags = opt.power_family ? std::vector<double>{1.0} : opt.magnitudes;
  if (dimension == 1) {
    for (double s : {1.0, -1.0}) {
      for (double mg : mags) xis.push_back({s * mg, 0.0});
    }
  } else {
    for (int d = 0; d < opt.directions; ++d) {
      const double phi = 2.0 * std::numbers::pi * d / opt.directions;
      // Snap tiny components so axis samples are exact.
      double c = std::cos(phi), s = std::sin(phi);
      if (std::abs(c) < 1e-15) c = 0.0;
      if (std::abs(s) < 1e-15) s = 0.0;
      for (double mg : mags) xis.push_back({mg * c, mg * s});
    }
  }
  std::vector<LatticeDirection> dirs;
  if (dimension == 1) {
    dirs.push_back({1, 0});
  } else {
    for (int d = 0; d < opt.directions; ++d) {
      const auto ld = lattice_direction(std::numbers::pi * d / opt.directions);
      if (std::none_of(dirs.begin(), dirs.end(),
                       [&](const auto& o) { return o.n1 == ld.n1 && o.n2 == ld.n2; })) {
        dirs.push_back(ld);
      }
    }
  }

  t.bulk.resize(xis.size());
  t.surface.resize(dirs.size());
  const std::size_t nb = xis.size();
  parallel_for(nb + dirs.size(), opt.jobs, [&](std::size_t k) {
    if (k < nb) {
      const double fine = f_hom_cell(cell, dimension, xis[k], R, opt.solver);
      const double rough = f_hom_cell(cell, dimension, xis[k], coarse, opt.solver);
      t.bulk[k] = {xis[k], fine, std::abs(fine - rough)};
    } else {
      const auto& d = dirs[k - nb];
      const double fine = g_hom_cell(cell, dimension, d, R, opt.strip_cells);
      const double rough = g_hom_cell(cell, dimension, d, coarse, opt.strip_cells);
      const auto u = dimension == 1 ? std::array<double, 2>{1.0, 0.0} : d.unit();
      t.surface[k - nb] = {d, u, fine, std::abs(fine - rough)};
    }
  });
  return t;
}

namespace {

struct CellRange {
  double lo = 1e300, hi = -1e300;
  double arith = 0.0, harm = 0.0;
};

// Range and means of a coefficient sampled at cell centres (R = 64).
CellRange cell_range(const FieldSpec& f, int dimension) {
  const int R = 64;
  CellRange r;
  const int cells = dimension == 1 ? R : R * R;
  for (int c = 0; c < cells; ++c) {
    const double v = f.evaluate({((c % R) + 0.5) / R, dimension == 1 ? 0.0 : ((c / R) + 0.5) / R}, c);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
    r.arith += v / cells;
    r.harm += 1.0 / (v * cells);
  }
  r.harm = 1.0 / r.harm;
  return r;
}

}  // namespace

TableChecks check_effective_table(const EffectiveDensityTable& t, const MediumSpec& cell) {
  TableChecks out;
  auto fail = [&](const std::string& what) { out.failures.push_back(what); };
  CellRange a = cell_range(cell.bulk, t.dimension);
  if (cell.bulk_y) {
    const auto ay = cell_range(*cell.bulk_y, t.dimension);
    a.lo = std::min(a.lo, ay.lo);
    a.hi = std::max(a.hi, ay.hi);
  }
  CellRange k = cell_range(cell.toughness, t.dimension);
  if (cell.toughness_y && t.dimension == 2) {
    const auto ky = cell_range(*cell.toughness_y, t.dimension);
    k.lo = std::min(k.lo, ky.lo);
    k.hi = std::max(k.hi, ky.hi);
  }
  const double alpha_b = cell.alpha.value_or(a.lo);
  const double beta_b = cell.beta.value_or(a.hi);
  const double alpha_s = cell.alpha.value_or(k.lo);
  const double beta_s = cell.beta.value_or(k.hi);
  const double slack = 1e-9;
  for (const auto& b : t.bulk) {
    const double n = std::pow(std::hypot(b.xi[0], b.xi[1]), t.p);
    std::ostringstream os;
    os << "bulk sample (" << b.xi[0] << ", " << b.xi[1] << ") value " << b.value;
    if (b.value < alpha_b * n * (1 - slack) || b.value > beta_b * n * (1 + slack)) {
      fail(os.str() + " outside [alpha|xi|^p, beta|xi|^p]");
    }
    if (t.p == 2.0 && !cell.bulk_y &&
        (b.value < a.harm * n * (1 - slack) || b.value > a.arith * n * (1 + slack))) {
      fail(os.str() + " outside the harmonic/arithmetic mean bounds");
    }
  }
  // p-homogeneity and convexity along each sampled ray.
  for (const auto& b1 : t.bulk) {
    for (const auto& b2 : t.bulk) {
      const double n1 = std::hypot(b1.xi[0], b1.xi[1]);
      const double n2 = std::hypot(b2.xi[0], b2.xi[1]);
      const double cross = b1.xi[0] * b2.xi[1] - b1.xi[1] * b2.xi[0];
      const double dot = b1.xi[0] * b2.xi[0] + b1.xi[1] * b2.xi[1];
      if (!(n1 > 0.0 && n2 > n1) || std::abs(cross) > 1e-12 * n1 * n2 || dot <= 0.0) continue;
      const double expect = b1.value * std::pow(n2 / n1, t.p);
      if (std::abs(b2.value - expect) > 1e-8 * std::abs(expect)) {
        std::ostringstream os;
        os << "p-homogeneity fails between |xi| = " << n1 << " and " << n2;
        fail(os.str());
      }
    }
  }
  for (const auto& s : t.surface) {
    if (s.value < alpha_s * (1 - slack) || s.value > beta_s * (1 + slack)) {
      std::ostringstream os;
      os << "surface sample (" << s.nu[0] << ", " << s.nu[1] << ") value " << s.value
         << " outside [alpha, beta]";
      fail(os.str());
    }
  }
  return out;
}

std::string effective_table_csv(const EffectiveDensityTable& t) {
  CsvTable csv({"kind", "component1", "component2", "value", "resolution", "diagnostic"});
  for (const auto& b : t.bulk) {
    csv.row().add("bulk").add(b.xi[0]).add(b.xi[1]).add(b.value).add(t.resolution).add(b.diagnostic);
  }
  for (const auto& s : t.surface) {
    csv.row().add("surface").add(s.nu[0]).add(s.nu[1]).add(s.value).add(t.resolution).add(s.diagnostic);
  }
  return "# dimension=" + std::to_string(t.dimension) + " p=" + format_real(t.p) + "\n" + csv.str();
}

EffectiveDensityTable read_effective_table(const std::filesystem::path& path) {
  const CsvData d = read_csv(path);
  EffectiveDensityTable t;
  t.dimension = 1;
  {
    // The leading comment records dimension and exponent.
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    std::istringstream is(first);
    std::string tok;
    while (is >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
      if (key == "p") t.p = parse_real(value, path.string());
      if (key == "dimension") t.dimension = static_cast<int>(parse_integer(value, path.string()));
    }
  }
  const auto kind = d.column("kind");
  const auto c1 = d.column("component1");
  const auto c2 = d.column("component2");
  const auto val = d.column("value");
  const auto res = d.column("resolution");
  const auto diag = d.column("diagnostic");
  for (const auto& row : d.rows) {
    const std::string ctx = path.string();
    const std::array<double, 2> v{parse_real(row[c1], ctx), parse_real(row[c2], ctx)};
    t.resolution = static_cast<int>(parse_integer(row[res], ctx));
    if (row[kind] == "bulk") {
      t.bulk.push_back({v, parse_real(row[val], ctx), parse_real(row[diag], ctx)});
    } else if (row[kind] == "surface") {
      SurfaceEntry s;
      s.nu = v;
      s.value = parse_real(row[val], ctx);
      s.diagnostic = parse_real(row[diag], ctx);
      t.surface.push_back(s);
    } else {
      throw ConfigError(ctx + ": unknown table kind '" + row[kind] + "'");
    }
  }
  return t;
}

bool ScalingReport::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [this](const ScalingRow& r) { return r.relative_error <= tolerance; });
}

ScalingReport scaling_check(double c1, double c2, const MediumSpec& cell, int dimension,
                            int resolution, const std::vector<std::array<double, 2>>& xis,
                            const std::vector<LatticeDirection>& nus, int jobs) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("scaling factors must be positive");
  ScalingReport rep;
  rep.c1 = c1;
  rep.c2 = c2;
  const MediumSpec scaled = cell.scaled(c1, c2);
  rep.rows.resize(xis.size() + nus.size());
  parallel_for(rep.rows.size(), jobs, [&](std::size_t k) {
    ScalingRow& r = rep.rows[k];
    if (k < xis.size()) {
      r.kind = "bulk";
      r.sample = xis[k];
      r.base = f_hom_cell(cell, dimension, xis[k], resolution);
      r.scaled = f_hom_cell(scaled, dimension, xis[k], resolution);
      r.expected = c1 * r.base;
    } else {
      const auto& d = nus[k - xis.size()];
      r.kind = "surface";
      r.sample = d.unit();
      r.base = g_hom_cell(cell, dimension, d, resolution);
      r.scaled = g_hom_cell(scaled, dimension, d, resolution);
      r.expected = c2 * r.base;
    }
    r.relative_error = std::abs(r.scaled - r.expected) / std::max(std::abs(r.expected), 1e-300);
  });
  return rep;
}

}  // namespace hfrac
