#include "hfrac/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hfrac/csv.hpp"
#include "hfrac/errors.hpp"

namespace hfrac {

namespace fs = std::filesystem;

struct Config::Impl {
  YAML::Node root;
  fs::path base;
};

namespace {

// A map node together with its dotted location, for error messages.
class Section {
 public:
  Section(YAML::Node node, std::string where) : node_(std::move(node)), where_(std::move(where)) {
    if (node_ && !node_.IsMap()) throw ConfigError(where_ + ": expected a mapping");
  }

  bool defined() const { return static_cast<bool>(node_); }
  bool has(const std::string& key) const { return node_ && node_[key]; }
  YAML::Node raw(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }
  std::string at(const std::string& key) const { return where_ + "." + key; }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_) return;
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!ok.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }
  }

  template <class T>
  T get(const std::string& key) const {
    if (!has(key)) throw ConfigError(at(key) + ": missing");
    return convert<T>(node_[key], at(key));
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? convert<T>(node_[key], at(key)) : fallback;
  }

  template <class T>
  std::vector<T> list(const std::string& key) const {
    if (!has(key)) return {};
    const YAML::Node n = node_[key];
    if (n.IsScalar()) return {convert<T>(n, at(key))};
    if (!n.IsSequence()) throw ConfigError(at(key) + ": expected a list");
    std::vector<T> out;
    for (const auto& v : n) out.push_back(convert<T>(v, at(key)));
    return out;
  }

  Section sub(const std::string& key) const { return Section(raw(key), at(key)); }

  template <class T>
  static T convert(const YAML::Node& n, const std::string& where) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      std::ostringstream os;
      os << n;
      throw ConfigError(where + ": invalid value '" + os.str() + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string where_;
};

Section section(const YAML::Node& root, const std::string& name) {
  return Section(root[name], name);
}

Face parse_face(const std::string& s, const std::string& where) {
  if (s == "left") return Face::left;
  if (s == "right") return Face::right;
  if (s == "bottom") return Face::bottom;
  if (s == "top") return Face::top;
  throw ConfigError(where + ": unknown face '" + s + "' (left, right, bottom, top)");
}

int parse_axis(const YAML::Node& n, const std::string& where) {
  const auto s = Section::convert<std::string>(n, where);
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  throw ConfigError(where + ": axis must be x or y");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() || base.empty() ? q : base / q;
}

std::vector<double> read_index_value_csv(const fs::path& path) {
  const CsvData d = read_csv(path);
  if (d.header.size() < 2) throw ConfigError(path.string() + ": needs an index and a value column");
  const std::size_t vi = d.column("value");
  std::vector<double> out(d.rows.size(), 0.0);
  std::vector<std::uint8_t> seen(d.rows.size(), 0);
  for (const auto& r : d.rows) {
    const long i = parse_integer(r.at(0), path.string() + " index");
    if (i < 0 || i >= static_cast<long>(out.size()) || seen[i]) {
      throw ConfigError(path.string() + ": indices must cover 0..rows-1 exactly once");
    }
    seen[i] = 1;
    out[i] = parse_real(r.at(vi), path.string() + " value");
  }
  return out;
}

FieldSpec parse_field(const Section& parent, const std::string& key, const fs::path& base) {
  const YAML::Node n = parent.raw(key);
  if (n.IsScalar()) return FieldSpec::constant(Section::convert<double>(n, parent.at(key)));
  const Section s = parent.sub(key);
  const auto kind = s.get<std::string>("kind");
  if (kind == "constant") {
    s.allow({"kind", "value"});
    return FieldSpec::constant(s.get<double>("value"));
  }
  if (kind == "layered") {
    s.allow({"kind", "axis", "values", "fractions"});
    const int axis = s.has("axis") ? parse_axis(s.raw("axis"), s.at("axis")) : 0;
    return FieldSpec::layered(axis, s.list<double>("values"), s.list<double>("fractions"));
  }
  if (kind == "checkerboard") {
    s.allow({"kind", "values"});
    const auto v = s.list<double>("values");
    if (v.size() != 2) throw ConfigError(s.at("values") + ": checkerboard needs two values");
    return FieldSpec::checkerboard(v[0], v[1]);
  }
  if (kind == "table") {
    s.allow({"kind", "file", "values"});
    FieldSpec f;
    f.kind = FieldSpec::Kind::table;
    f.table = s.has("file") ? read_index_value_csv(resolve(base, s.get<std::string>("file")))
                            : s.list<double>("values");
    if (f.table.empty()) throw ConfigError(s.at("file") + ": empty table");
    return f;
  }
  throw ConfigError(s.at("kind") + ": unknown field kind '" + kind + "'");
}

std::array<double, 2> pair_of(const std::vector<double>& v, int dim, const std::string& where) {
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(where + ": expected " + std::to_string(dim) + " value(s)");
  }
  return {v[0], dim == 2 ? v[1] : 0.0};
}

}  // namespace

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.parent_path());
}

Config Config::parse(const std::string& text, const fs::path& base_dir) {
  auto impl = std::make_shared<Impl>();
  try {
    impl->root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (impl->root.IsNull()) impl->root = YAML::Node(YAML::NodeType::Map);
  if (!impl->root.IsMap()) throw ConfigError("config must be a mapping of sections");
  static const std::set<std::string> known{"grid",   "medium", "datum", "evolution", "verify",
                                           "cell",   "sweep",  "probe"};
  for (const auto& kv : impl->root) {
    const auto k = kv.first.as<std::string>();
    if (!known.count(k)) throw ConfigError("unknown config section '" + k + "'");
  }
  impl->base = base_dir;
  Config c;
  c.impl_ = std::move(impl);
  return c;
}

bool Config::has(const std::string& name) const { return static_cast<bool>(impl_->root[name]); }

Grid Config::grid() const {
  const Section s = section(impl_->root, "grid");
  if (!s.defined()) throw ConfigError("grid: missing section");
  s.allow({"dimension", "extent", "nodes", "origin", "dirichlet", "dirichlet_nodes"});
  const int dim = s.get<int>("dimension");
  if (dim != 1 && dim != 2) throw ConfigError("grid.dimension: must be 1 or 2");
  const auto extent = pair_of(s.list<double>("extent"), dim, s.at("extent"));
  const auto nodes_v = s.list<int>("nodes");
  const auto nodes = pair_of({nodes_v.begin(), nodes_v.end()}, dim, s.at("nodes"));
  std::array<double, 2> origin{0.0, 0.0};
  if (s.has("origin")) origin = pair_of(s.list<double>("origin"), dim, s.at("origin"));
  DirichletSpec d;
  for (const auto& f : s.list<std::string>("dirichlet")) d.faces.push_back(parse_face(f, s.at("dirichlet")));
  for (long n : s.list<long>("dirichlet_nodes")) d.nodes.push_back(static_cast<NodeId>(n));
  return build_grid(dim, extent, {static_cast<int>(nodes[0]), dim == 2 ? static_cast<int>(nodes[1]) : 1},
                    d, origin);
}

MediumSpec Config::medium_spec() const {
  const Section s = section(impl_->root, "medium");
  s.allow({"p", "alpha", "beta", "epsilon", "bulk", "bulk_y", "toughness", "toughness_y"});
  MediumSpec m;
  m.p = s.get<double>("p", 2.0);
  if (s.has("alpha")) m.alpha = s.get<double>("alpha");
  if (s.has("beta")) m.beta = s.get<double>("beta");
  const fs::path& base = impl_->base;
  if (s.has("bulk")) m.bulk = parse_field(s, "bulk", base);
  if (s.has("bulk_y")) m.bulk_y = parse_field(s, "bulk_y", base);
  if (s.has("toughness")) m.toughness = parse_field(s, "toughness", base);
  if (s.has("toughness_y")) m.toughness_y = parse_field(s, "toughness_y", base);
  return m;
}

std::optional<double> Config::epsilon() const {
  const Section s = section(impl_->root, "medium");
  if (!s.has("epsilon")) return std::nullopt;
  return s.get<double>("epsilon");
}

Medium Config::medium(const Grid& grid) const {
  const MediumSpec spec = medium_spec();
  if (const auto eps = epsilon()) return sample_periodic(PeriodicMedium{spec, *eps}, grid);
  return sample_medium(spec, grid);
}

BoundaryDatum Config::datum(const Grid& grid) const {
  const Section s = section(impl_->root, "datum");
  if (!s.defined()) throw ConfigError("datum: missing section");
  s.allow({"times", "t_end", "dt", "profile", "file", "bound"});
  const double bound = s.get<double>("bound", -1.0);
  if (s.has("file")) {
    const fs::path path = resolve(impl_->base, s.get<std::string>("file"));
    const CsvData d = read_csv(path);
    const std::size_t tc = d.column("t");
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    for (const auto& r : d.rows) {
      times.push_back(parse_real(r.at(tc), path.string() + " t"));
      std::vector<double> row;
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c != tc) row.push_back(parse_real(r[c], path.string() + " value"));
      }
      values.push_back(std::move(row));
    }
    return BoundaryDatum::tabulated(std::move(times), std::move(values), bound);
  }
  std::vector<double> times;
  if (s.has("times")) {
    times = s.list<double>("times");
  } else {
    times = BoundaryDatum::uniform_times(s.get<double>("t_end"), s.get<double>("dt"));
  }
  std::vector<double> profile;
  const YAML::Node p = s.raw("profile");
  if (p && p.IsScalar()) {
    const int axis = parse_axis(p, s.at("profile"));
    if (axis >= grid.dimension()) throw ConfigError(s.at("profile") + ": axis exceeds the grid dimension");
    for (NodeId n : grid.dirichlet_nodes()) profile.push_back(grid.node_position(n)[axis]);
  } else {
    profile = s.list<double>("profile");
  }
  return BoundaryDatum::ramp(std::move(times), std::move(profile), bound);
}

EvolutionOptions Config::evolution() const {
  const Section s = section(impl_->root, "evolution");
  s.allow({"backend", "candidates", "tie_tolerance", "check_invariants", "verify_each_step",
           "verify_budget"});
  EvolutionOptions o;
  o.backend = parse_backend(s.get<std::string>("backend", "exhaustive1d"));
  for (long e : s.list<long>("candidates")) o.candidates.push_back(static_cast<EdgeId>(e));
  o.tie_tolerance = s.get<double>("tie_tolerance", o.tie_tolerance);
  if (!(o.tie_tolerance >= 0.0 && o.tie_tolerance < 1.0)) {
    throw ConfigError("evolution.tie_tolerance: must lie in [0, 1)");
  }
  o.check_invariants = s.get<bool>("check_invariants", true);
  o.verify_each_step = s.get<bool>("verify_each_step", false);
  o.verify_budget = s.get<int>("verify_budget", o.verify_budget);
  if (o.verify_budget < 0) throw ConfigError("evolution.verify_budget: must be >= 0");
  return o;
}

VerifySettings Config::verify() const {
  const Section s = section(impl_->root, "verify");
  s.allow({"steps", "budget", "seed"});
  VerifySettings v;
  const YAML::Node st = s.raw("steps");
  if (st && !(st.IsScalar() && st.as<std::string>() == "all")) {
    for (long k : s.list<long>("steps")) {
      if (k < 0) throw ConfigError("verify.steps: must be >= 0");
      v.steps.push_back(static_cast<std::size_t>(k));
    }
  }
  v.budget = s.get<int>("budget", v.budget);
  if (v.budget < 0) throw ConfigError("verify.budget: must be >= 0");
  v.seed = s.get<std::uint64_t>("seed", 0);
  return v;
}

CellSettings Config::cell() const {
  const Section s = section(impl_->root, "cell");
  s.allow({"dimension", "resolution", "directions", "magnitudes", "power_family", "strip_cells",
           "scaling"});
  CellSettings c;
  c.dimension = s.get<int>("dimension", 2);
  if (c.dimension != 1 && c.dimension != 2) throw ConfigError("cell.dimension: must be 1 or 2");
  c.table.resolution = s.get<int>("resolution", c.table.resolution);
  c.table.directions = s.get<int>("directions", c.table.directions);
  if (c.table.directions < 1) throw ConfigError("cell.directions: must be >= 1");
  if (s.has("magnitudes")) c.table.magnitudes = s.list<double>("magnitudes");
  c.table.power_family = s.get<bool>("power_family", false);
  c.table.strip_cells = s.get<int>("strip_cells", 1);
  if (c.table.strip_cells < 1) throw ConfigError("cell.strip_cells: must be >= 1");
  if (s.has("scaling")) {
    const auto v = s.list<double>("scaling");
    if (v.size() != 2) throw ConfigError("cell.scaling: expected [c1, c2]");
    c.scaling = std::array<double, 2>{v[0], v[1]};
  }
  return c;
}

SweepSettings Config::sweep() const {
  const Section s = section(impl_->root, "sweep");
  s.allow({"dimension", "epsilons", "nodes", "t_end", "dt", "tolerance", "lsc_tolerance",
           "table_resolution", "table"});
  SweepSettings w;
  SweepOptions& o = w.options;
  o.dimension = s.get<int>("dimension", 1);
  o.epsilons = s.list<double>("epsilons");
  o.nodes = s.get<int>("nodes", 0);
  o.t_end = s.get<double>("t_end", o.t_end);
  o.dt = s.get<double>("dt", o.dt);
  o.tolerance = s.get<double>("tolerance", o.tolerance);
  o.lsc_tolerance = s.get<double>("lsc_tolerance", o.lsc_tolerance);
  o.table_resolution = s.get<int>("table_resolution", o.table_resolution);
  if (s.has("table")) w.table = resolve(impl_->base, s.get<std::string>("table"));
  return w;
}

SigmaProbeRequest Config::probe() const {
  const Section s = section(impl_->root, "probe");
  if (!s.defined()) throw ConfigError("probe: missing section");
  s.allow({"sequence", "line_y", "edges_file", "centers", "radii", "nu", "ns"});
  SigmaProbeRequest r;
  const auto name = s.get<std::string>("sequence");
  if (name == "edge-list") {
    r.sequence.kind = SequenceDescriptor::Kind::edge_list;
    const fs::path path = resolve(impl_->base, s.get<std::string>("edges_file"));
    const CsvData d = read_csv(path);
    const std::size_t c = d.column("edge");
    for (const auto& row : d.rows) {
      r.sequence.edges.push_back(static_cast<EdgeId>(parse_integer(row.at(c), path.string())));
    }
  } else {
    r.sequence = parse_sequence(name);
  }
  r.sequence.line_y = s.get<double>("line_y", 0.0);
  const YAML::Node centers = s.raw("centers");
  if (!centers || !centers.IsSequence()) throw ConfigError("probe.centers: expected a list of [x, y]");
  for (const auto& c : centers) {
    const auto v = Section::convert<std::vector<double>>(c, s.at("centers"));
    r.centers.push_back(pair_of(v, 2, s.at("centers")));
  }
  r.radii = s.list<double>("radii");
  if (r.radii.empty()) throw ConfigError("probe.radii: missing");
  if (s.has("nu")) {
    r.nu_axes.clear();
    for (const auto& v : s.list<std::string>("nu")) {
      if (v == "e1") {
        r.nu_axes.push_back(0);
      } else if (v == "e2") {
        r.nu_axes.push_back(1);
      } else {
        throw ConfigError("probe.nu: directions are e1 or e2");
      }
    }
  }
  for (long n : s.list<long>("ns")) {
    if (n < 1) throw ConfigError("probe.ns: must be >= 1");
    r.ns.push_back(static_cast<int>(n));
  }
  return r;
}

}  // namespace hfrac
