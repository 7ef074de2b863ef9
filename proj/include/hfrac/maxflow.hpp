#pragma once

#include <cstdint>
#include <vector>

namespace hfrac {

/// Integer max-flow / min-cut on a directed graph with terminal links,
/// using the Boykov-Kolmogorov search-tree algorithm (fast on lattices).
///
/// After solve(), certify() checks the flow against the original capacities
/// and compares its value with the capacity of the residual-reachability cut,
/// giving a self-contained optimality proof.
class MaxFlow {
 public:
  using Capacity = std::int64_t;

  explicit MaxFlow(int num_nodes);

  int num_nodes() const { return static_cast<int>(first_.size()); }
  /// Adds arc a->b with capacity cap_ab and its reverse with cap_ba.
  void add_edge(int a, int b, Capacity cap_ab, Capacity cap_ba);
  /// Adds capacity on the links source->node and node->sink.
  void add_terminal(int node, Capacity source_cap, Capacity sink_cap);

  Capacity solve();
  Capacity flow_value() const { return flow_; }

  /// Nodes reachable from the source in the residual graph (valid after solve).
  const std::vector<std::uint8_t>& source_side() const { return source_side_; }

  struct Certificate {
    bool capacity_ok = false;
    bool conservation_ok = false;
    Capacity flow_value = 0;
    Capacity cut_capacity = 0;
    bool optimal() const { return capacity_ok && conservation_ok && flow_value == cut_capacity; }
  };
  Certificate certify() const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  void set_active(int i);
  int next_active();
  void augment(int middle);
  void process_source_orphan(int i);
  void process_sink_orphan(int i);
  void compute_source_side();

  // nodes
  std::vector<int> first_;
  std::vector<int> parent_;
  std::vector<std::uint8_t> is_sink_;
  std::vector<long> ts_;
  std::vector<int> dist_;
  std::vector<Capacity> src_cap_, sink_cap_;  // original
  std::vector<Capacity> src_res_, sink_res_;  // residual
  std::vector<std::uint8_t> in_active_;
  std::vector<int> active_;  // FIFO with moving head
  std::size_t active_head_ = 0;
  std::vector<int> orphans_;  // deque emulated with head index + front stack
  std::vector<int> orphan_front_;
  std::size_t orphan_head_ = 0;
  // arcs
  std::vector<int> head_, next_, sister_;
  std::vector<Capacity> cap_, res_;

  Capacity flow_ = 0;
  long time_ = 0;
  std::vector<std::uint8_t> source_side_;
};

}  // namespace hfrac
