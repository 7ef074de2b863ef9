#include "hfrac/datum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfrac/errors.hpp"

namespace hfrac {

BoundaryDatum BoundaryDatum::ramp(std::vector<double> times, std::vector<double> profile,
                                  double bound) {
  BoundaryDatum d;
  d.times_ = std::move(times);
  d.profile_ = std::move(profile);
  d.num_nodes_ = d.profile_.size();
  d.bound_ = bound;
  d.validate();
  return d;
}

BoundaryDatum BoundaryDatum::tabulated(std::vector<double> times,
                                       std::vector<std::vector<double>> values, double bound) {
  BoundaryDatum d;
  d.times_ = std::move(times);
  d.values_ = std::move(values);
  if (d.values_.size() != d.times_.size()) {
    throw ConfigError("tabulated datum needs one row of node values per time");
  }
  d.num_nodes_ = d.values_.empty() ? 0 : d.values_.front().size();
  for (const auto& row : d.values_) {
    if (row.size() != d.num_nodes_) throw ConfigError("tabulated datum rows differ in length");
  }
  d.bound_ = bound;
  d.validate();
  return d;
}

std::vector<double> BoundaryDatum::uniform_times(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("time grid needs dt > 0 and t_end > 0");
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  if (steps < 1) throw ConfigError("time grid has no steps");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i <= steps; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
  return t;
}

void BoundaryDatum::validate() {
  if (times_.empty()) throw ConfigError("time grid is empty");
  if (times_.front() < 0.0) throw ConfigError("time grid must start at t >= 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) sup = std::max(sup, sup_norm(i));
  if (!std::isfinite(sup)) throw ConfigError("boundary datum is not finite");
  if (bound_ < 0.0) {
    bound_ = sup;
  } else if (sup > bound_ * (1.0 + 1e-12)) {
    throw ConfigError("boundary datum exceeds its declared bound C = " + std::to_string(bound_));
  }
}

std::vector<double> BoundaryDatum::values(std::size_t step) const {
  if (!is_ramp()) return values_.at(step);
  std::vector<double> v(profile_.size());
  const double t = times_.at(step);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = profile_[k] * t;
  return v;
}

std::vector<double> BoundaryDatum::rate(std::size_t step) const {
  if (is_ramp()) return profile_;
  std::vector<double> r(num_nodes_, 0.0);
  if (times_.size() < 2) return r;
  const std::size_t a = step == 0 ? 0 : step - 1;
  const std::size_t b = step == 0 ? 1 : step;
  const double dt = times_[b] - times_[a];
  for (std::size_t k = 0; k < num_nodes_; ++k) r[k] = (values_[b][k] - values_[a][k]) / dt;
  return r;
}

double BoundaryDatum::sup_norm(std::size_t step) const {
  double m = 0.0;
  for (double v : values(step)) m = std::max(m, std::abs(v));
  return m;
}

double BoundaryDatum::max_step() const {
  double d = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) d = std::max(d, times_[i] - times_[i - 1]);
  return d;
}

}  // namespace hfrac
