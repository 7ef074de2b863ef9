#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hfrac/grid.hpp"
#include "hfrac/medium.hpp"

namespace hfrac {

/// Nodal displacement plus the set of crack sites across which it may jump.
struct ScalarField {
  std::vector<double> values;
  /// Sorted crack ids (edges and ghosts) that are open.
  std::vector<EdgeId> open;

  double sup_norm() const;
};

struct EnergyBreakdown {
  double bulk = 0.0;
  double surface = 0.0;
  double total() const { return bulk + surface; }
};

/// Cracked lattice edges plus released Dirichlet nodes (their ghost edges).
class CrackState {
 public:
  CrackState() = default;
  explicit CrackState(const Grid& grid) : mask_(grid.num_crack_ids(), 0) {}

  std::size_t capacity() const { return mask_.size(); }
  bool contains(EdgeId id) const { return mask_[id] != 0; }
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  /// Sorted ascending.
  std::span<const EdgeId> ids() const { return ids_; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  void insert(EdgeId id, const Medium& medium);
  void insert(std::span<const EdgeId> ids, const Medium& medium);

  /// Cached kappa-weighted measure of the cracked sites.
  double surface_energy() const { return surface_energy_; }
  /// Sum over the sorted id list, from scratch.
  double recompute_surface_energy(const Medium& medium) const;
  /// Unweighted H^{N-1} measure.
  double measure(const Grid& grid) const;

  bool released(const Grid& grid, NodeId n) const;
  bool subset_of(const CrackState& other) const;
  /// Ids in this state but not in `base`.
  std::vector<EdgeId> difference(const CrackState& base) const;

  friend bool operator==(const CrackState& a, const CrackState& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::uint8_t> mask_;
  std::vector<EdgeId> ids_;
  double surface_energy_ = 0.0;
};

}  // namespace hfrac
