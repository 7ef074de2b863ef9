#include "hfrac/fields.hpp"

#include <algorithm>
#include <cmath>

#include "hfrac/errors.hpp"

namespace hfrac {

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void CrackState::insert(EdgeId id, const Medium& medium) {
  insert(std::span<const EdgeId>(&id, 1), medium);
}

void CrackState::insert(std::span<const EdgeId> ids, const Medium& medium) {
  bool changed = false;
  for (EdgeId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= mask_.size()) {
      throw ConfigError("crack id " + std::to_string(id) + " out of range");
    }
    if (!mask_[id]) {
      mask_[id] = 1;
      ids_.push_back(id);
      changed = true;
    }
  }
  if (changed) {
    std::sort(ids_.begin(), ids_.end());
    surface_energy_ = recompute_surface_energy(medium);
  }
}

double CrackState::recompute_surface_energy(const Medium& medium) const {
  double s = 0.0;
  for (EdgeId id : ids_) s += medium.surface_weight(id);
  return s;
}

double CrackState::measure(const Grid& grid) const {
  double s = 0.0;
  for (EdgeId id : ids_) s += grid.measure(id);
  return s;
}

bool CrackState::released(const Grid& grid, NodeId n) const {
  const int k = grid.ghost_index(n);
  return k >= 0 && contains(grid.ghost_edge(k));
}

bool CrackState::subset_of(const CrackState& other) const {
  return std::all_of(ids_.begin(), ids_.end(), [&](EdgeId id) {
    return static_cast<std::size_t>(id) < other.mask_.size() && other.mask_[id];
  });
}

std::vector<EdgeId> CrackState::difference(const CrackState& base) const {
  std::vector<EdgeId> out;
  for (EdgeId id : ids_) {
    if (static_cast<std::size_t>(id) >= base.mask_.size() || !base.mask_[id]) out.push_back(id);
  }
  return out;
}

}  // namespace hfrac
