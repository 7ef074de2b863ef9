#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hfrac/grid.hpp"

namespace hfrac {

/// A scalar coefficient field described on the unit cell [0,1]^d.
struct FieldSpec {
  enum class Kind { constant, layered, checkerboard, table };

  Kind kind = Kind::constant;
  double value = 1.0;
  /// layered: coordinate along which the layers alternate (0 = x, 1 = y).
  int axis = 0;
  /// layered: one value per layer; checkerboard: exactly two values.
  std::vector<double> values;
  /// layered: volume fraction of each layer, summing to 1.
  std::vector<double> fractions;
  /// table: explicit value per cell (bulk) or per crack site (toughness).
  std::vector<double> table;

  static FieldSpec constant(double v);
  static FieldSpec layered(int axis, std::vector<double> values, std::vector<double> fractions);
  static FieldSpec checkerboard(double v0, double v1);

  /// `y` is in unit-cell coordinates; `index` is only used by tables.
  double evaluate(std::array<double, 2> y, int index) const;
  /// Same field with the two coordinates exchanged.
  FieldSpec transposed() const;
  FieldSpec scaled(double c) const;
  double min_value() const;
  double max_value() const;
};

/// Unit-cell (or whole-domain) description of a medium f(x,xi) = a(x)|xi|^p,
/// g(x,nu) = kappa(x,nu).
struct MediumSpec {
  double p = 2.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  FieldSpec bulk = FieldSpec::constant(1.0);
  /// Separate coefficient for gradients along y (p = 2 only).
  std::optional<FieldSpec> bulk_y;
  /// Toughness of faces with normal e1 (and of all faces if toughness_y unset).
  FieldSpec toughness = FieldSpec::constant(1.0);
  std::optional<FieldSpec> toughness_y;

  const FieldSpec& bulk_for(int axis) const { return axis == 1 && bulk_y ? *bulk_y : bulk; }
  const FieldSpec& toughness_for(int axis) const {
    return axis == 1 && toughness_y ? *toughness_y : toughness;
  }
  MediumSpec transposed() const;
  MediumSpec scaled(double c_bulk, double c_surface) const;
};

struct PeriodicMedium {
  MediumSpec cell;
  double epsilon = 1.0;
};

/// Coefficients sampled on a particular grid.
class Medium {
 public:
  /// Validates sizes, p >= 1, 0 < alpha <= beta and the coefficient bounds.
  Medium(const Grid& grid, double p, double alpha, double beta,
         std::array<std::vector<double>, 2> bulk, std::vector<double> toughness);

  double p() const { return p_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::span<const double> bulk(int axis = 0) const { return bulk_[axis]; }
  bool isotropic() const { return bulk_[0] == bulk_[1]; }
  std::span<const double> toughness() const { return toughness_; }
  /// kappa * measure for each crack site.
  double surface_weight(EdgeId id) const { return weight_[id]; }
  std::span<const double> surface_weights() const { return weight_; }

 private:
  double p_;
  double alpha_;
  double beta_;
  std::array<std::vector<double>, 2> bulk_;
  std::vector<double> toughness_;
  std::vector<double> weight_;
};

/// Samples at cell centres / edge midpoints in domain-normalised coordinates
/// (x - origin) / extent. Undeclared alpha/beta default to the sampled range.
Medium sample_medium(const MediumSpec& spec, const Grid& grid);

/// Samples the unit cell at (x / epsilon) mod 1.
Medium sample_periodic(const PeriodicMedium& pm, const Grid& grid);

}  // namespace hfrac
