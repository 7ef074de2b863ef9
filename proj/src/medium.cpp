#include "hfrac/medium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "hfrac/errors.hpp"

namespace hfrac {

FieldSpec FieldSpec::constant(double v) {
  FieldSpec f;
  f.kind = Kind::constant;
  f.value = v;
  return f;
}

FieldSpec FieldSpec::layered(int axis, std::vector<double> values, std::vector<double> fractions) {
  if (values.empty() || values.size() != fractions.size()) {
    throw ConfigError("layered field needs one fraction per value");
  }
  const double total = std::accumulate(fractions.begin(), fractions.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("layer fractions must sum to 1");
  if (std::any_of(fractions.begin(), fractions.end(), [](double f) { return f <= 0.0; })) {
    throw ConfigError("layer fractions must be positive");
  }
  if (axis != 0 && axis != 1) throw ConfigError("layer axis must be x or y");
  FieldSpec f;
  f.kind = Kind::layered;
  f.axis = axis;
  f.values = std::move(values);
  f.fractions = std::move(fractions);
  return f;
}

FieldSpec FieldSpec::checkerboard(double v0, double v1) {
  FieldSpec f;
  f.kind = Kind::checkerboard;
  f.values = {v0, v1};
  return f;
}

double FieldSpec::evaluate(std::array<double, 2> y, int index) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::layered: {
      const double s = y[axis];
      double upper = 0.0;
      for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        upper += fractions[k];
        if (s < upper) return values[k];
      }
      return values.back();
    }
    case Kind::checkerboard: {
      const int a = std::min(1, static_cast<int>(std::floor(2.0 * y[0])));
      const int b = std::min(1, static_cast<int>(std::floor(2.0 * y[1])));
      return values[(a + b) % 2];
    }
    case Kind::table:
      if (index < 0 || index >= static_cast<int>(table.size())) {
        throw ConfigError("explicit table has no entry for index " + std::to_string(index));
      }
      return table[index];
  }
  return value;
}

FieldSpec FieldSpec::transposed() const {
  FieldSpec f = *this;
  if (kind == Kind::layered) f.axis = 1 - axis;
  if (kind == Kind::table) throw ConfigError("explicit tables cannot be transposed");
  return f;
}

FieldSpec FieldSpec::scaled(double c) const {
  FieldSpec f = *this;
  f.value *= c;
  for (double& v : f.values) v *= c;
  for (double& v : f.table) v *= c;
  return f;
}

double FieldSpec::min_value() const {
  switch (kind) {
    case Kind::constant: return value;
    case Kind::layered:
    case Kind::checkerboard: return *std::min_element(values.begin(), values.end());
    case Kind::table:
      return table.empty() ? value : *std::min_element(table.begin(), table.end());
  }
  return value;
}

double FieldSpec::max_value() const {
  switch (kind) {
    case Kind::constant: return value;
    case Kind::layered:
    case Kind::checkerboard: return *std::max_element(values.begin(), values.end());
    case Kind::table:
      return table.empty() ? value : *std::max_element(table.begin(), table.end());
  }
  return value;
}

MediumSpec MediumSpec::transposed() const {
  MediumSpec m = *this;
  const FieldSpec bx = bulk_for(0).transposed();
  const FieldSpec by = bulk_for(1).transposed();
  m.bulk = by;
  m.bulk_y = bx;
  const FieldSpec kx = toughness_for(0).transposed();
  const FieldSpec ky = toughness_for(1).transposed();
  m.toughness = ky;
  m.toughness_y = kx;
  return m;
}

MediumSpec MediumSpec::scaled(double c_bulk, double c_surface) const {
  MediumSpec m = *this;
  m.bulk = bulk.scaled(c_bulk);
  if (bulk_y) m.bulk_y = bulk_y->scaled(c_bulk);
  m.toughness = toughness.scaled(c_surface);
  if (toughness_y) m.toughness_y = toughness_y->scaled(c_surface);
  const double lo = std::min(c_bulk, c_surface);
  const double hi = std::max(c_bulk, c_surface);
  if (alpha) m.alpha = *alpha * lo;
  if (beta) m.beta = *beta * hi;
  return m;
}

Medium::Medium(const Grid& grid, double p, double alpha, double beta,
               std::array<std::vector<double>, 2> bulk, std::vector<double> toughness)
    : p_(p), alpha_(alpha), beta_(beta), bulk_(std::move(bulk)), toughness_(std::move(toughness)) {
  if (!(p_ >= 1.0) || !std::isfinite(p_)) throw ConfigError("growth exponent p must be >= 1");
  if (!(alpha_ > 0.0) || !(alpha_ <= beta_)) throw ConfigError("need 0 < alpha <= beta");
  const auto cells = static_cast<std::size_t>(grid.num_cells());
  if (bulk_[1].empty()) bulk_[1] = bulk_[0];
  if (bulk_[0].size() != cells || bulk_[1].size() != cells) {
    throw ConfigError("bulk coefficient table must have one entry per cell");
  }
  if (toughness_.size() != static_cast<std::size_t>(grid.num_crack_ids())) {
    throw ConfigError("toughness table must have one entry per edge and Dirichlet node");
  }
  if (p_ != 2.0 && !isotropic()) {
    throw ConfigError("axis-anisotropic bulk coefficients require p = 2");
  }
  const double lo = alpha_ * (1.0 - 1e-12);
  const double hi = beta_ * (1.0 + 1e-12);
  auto check = [&](const std::vector<double>& v, const char* what) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] >= lo && v[k] <= hi)) {
        throw ConfigError(std::string(what) + " coefficient " + std::to_string(v[k]) +
                          " at index " + std::to_string(k) + " outside [alpha, beta] = [" +
                          std::to_string(alpha_) + ", " + std::to_string(beta_) + "]");
      }
    }
  };
  check(bulk_[0], "bulk");
  check(bulk_[1], "bulk");
  check(toughness_, "toughness");
  weight_.resize(toughness_.size());
  for (std::size_t k = 0; k < toughness_.size(); ++k) {
    weight_[k] = toughness_[k] * grid.measure(static_cast<EdgeId>(k));
  }
}

namespace {

using CoordMap = std::function<std::array<double, 2>(std::array<double, 2>)>;

Medium sample_with(const MediumSpec& spec, const Grid& grid, const CoordMap& to_cell) {
  std::array<std::vector<double>, 2> bulk;
  const bool aniso = spec.bulk_y.has_value();
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto y = to_cell(grid.cell_center(c));
    bulk[0].push_back(spec.bulk.evaluate(y, c));
    if (aniso) bulk[1].push_back(spec.bulk_y->evaluate(y, c));
  }
  std::vector<double> kappa;
  for (EdgeId id = 0; id < grid.num_crack_ids(); ++id) {
    const auto y = to_cell(grid.site_position(id));
    kappa.push_back(spec.toughness_for(grid.normal_axis(id)).evaluate(y, id));
  }
  auto range = [&](bool want_min) {
    double v = want_min ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    for (const auto& b : bulk) {
      for (double x : b) v = want_min ? std::min(v, x) : std::max(v, x);
    }
    for (double x : kappa) v = want_min ? std::min(v, x) : std::max(v, x);
    return v;
  };
  const double alpha = spec.alpha.value_or(range(true));
  const double beta = spec.beta.value_or(range(false));
  return Medium(grid, spec.p, alpha, beta, std::move(bulk), std::move(kappa));
}

}  // namespace

Medium sample_medium(const MediumSpec& spec, const Grid& grid) {
  const auto o = grid.origin();
  const auto L = grid.extent();
  const int d = grid.dimension();
  return sample_with(spec, grid, [o, L, d](std::array<double, 2> x) {
    std::array<double, 2> y{0.0, 0.0};
    for (int a = 0; a < d; ++a) y[a] = std::clamp((x[a] - o[a]) / L[a], 0.0, 1.0);
    return y;
  });
}

Medium sample_periodic(const PeriodicMedium& pm, const Grid& grid) {
  if (!(pm.epsilon > 0.0) || !std::isfinite(pm.epsilon)) {
    throw ConfigError("periodic medium needs epsilon > 0");
  }
  const double eps = pm.epsilon;
  const int d = grid.dimension();
  return sample_with(pm.cell, grid, [eps, d](std::array<double, 2> x) {
    std::array<double, 2> y{0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const double s = x[a] / eps;
      y[a] = s - std::floor(s);
    }
    return y;
  });
}

}  // namespace hfrac
