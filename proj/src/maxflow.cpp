#include "hfrac/maxflow.hpp"

#include <algorithm>
#include <limits>

#include "hfrac/errors.hpp"

namespace hfrac {

MaxFlow::MaxFlow(int num_nodes)
    : first_(num_nodes, kNone),
      parent_(num_nodes, kNone),
      is_sink_(num_nodes, 0),
      ts_(num_nodes, 0),
      dist_(num_nodes, 0),
      src_cap_(num_nodes, 0),
      sink_cap_(num_nodes, 0),
      src_res_(num_nodes, 0),
      sink_res_(num_nodes, 0),
      in_active_(num_nodes, 0) {}

void MaxFlow::add_edge(int a, int b, Capacity cap_ab, Capacity cap_ba) {
  if (cap_ab < 0 || cap_ba < 0) throw ConfigError("max-flow capacities must be nonnegative");
  if (a == b) return;
  const int ab = static_cast<int>(head_.size());
  const int ba = ab + 1;
  head_.push_back(b);
  next_.push_back(first_[a]);
  sister_.push_back(ba);
  cap_.push_back(cap_ab);
  first_[a] = ab;
  head_.push_back(a);
  next_.push_back(first_[b]);
  sister_.push_back(ab);
  cap_.push_back(cap_ba);
  first_[b] = ba;
}

void MaxFlow::add_terminal(int node, Capacity source_cap, Capacity sink_cap) {
  if (source_cap < 0 || sink_cap < 0) throw ConfigError("terminal capacities must be nonnegative");
  src_cap_[node] += source_cap;
  sink_cap_[node] += sink_cap;
}

void MaxFlow::set_active(int i) {
  if (in_active_[i]) return;
  in_active_[i] = 1;
  active_.push_back(i);
}

int MaxFlow::next_active() {
  while (active_head_ < active_.size()) {
    const int i = active_[active_head_++];
    in_active_[i] = 0;
    if (parent_[i] != kNone) return i;
  }
  active_.clear();
  active_head_ = 0;
  return kNone;
}

void MaxFlow::augment(int middle) {
  Capacity bottleneck = res_[middle];
  // source side: from the tail of `middle` up to the source
  int i = head_[sister_[middle]];
  while (true) {
    const int a = parent_[i];
    if (a == kTerminal) break;
    bottleneck = std::min(bottleneck, res_[sister_[a]]);
    i = head_[a];
  }
  bottleneck = std::min(bottleneck, src_res_[i]);
  i = head_[middle];
  while (true) {
    const int a = parent_[i];
    if (a == kTerminal) break;
    bottleneck = std::min(bottleneck, res_[a]);
    i = head_[a];
  }
  bottleneck = std::min(bottleneck, sink_res_[i]);

  res_[sister_[middle]] += bottleneck;
  res_[middle] -= bottleneck;

  auto orphan_front = [this](int n) {
    parent_[n] = kOrphan;
    orphan_front_.push_back(n);
  };

  i = head_[sister_[middle]];
  while (true) {
    const int a = parent_[i];
    if (a == kTerminal) break;
    res_[a] += bottleneck;
    res_[sister_[a]] -= bottleneck;
    if (res_[sister_[a]] == 0) orphan_front(i);
    i = head_[a];
  }
  src_res_[i] -= bottleneck;
  if (src_res_[i] == 0) orphan_front(i);

  i = head_[middle];
  while (true) {
    const int a = parent_[i];
    if (a == kTerminal) break;
    res_[sister_[a]] += bottleneck;
    res_[a] -= bottleneck;
    if (res_[a] == 0) orphan_front(i);
    i = head_[a];
  }
  sink_res_[i] -= bottleneck;
  if (sink_res_[i] == 0) orphan_front(i);

  flow_ += bottleneck;
}

void MaxFlow::process_source_orphan(int i) {
  constexpr int kInf = std::numeric_limits<int>::max();
  int a0_min = kNone;
  int d_min = kInf;
  for (int a0 = first_[i]; a0 != kNone; a0 = next_[a0]) {
    if (res_[sister_[a0]] == 0) continue;
    int j = head_[a0];
    if (is_sink_[j] || parent_[j] == kNone) continue;
    int d = 0;
    while (true) {
      if (ts_[j] == time_) {
        d += dist_[j];
        break;
      }
      const int a = parent_[j];
      ++d;
      if (a == kTerminal) {
        ts_[j] = time_;
        dist_[j] = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInf;
        break;
      }
      j = head_[a];
    }
    if (d < kInf) {
      if (d < d_min) {
        a0_min = a0;
        d_min = d;
      }
      for (j = head_[a0]; ts_[j] != time_; j = head_[parent_[j]]) {
        ts_[j] = time_;
        dist_[j] = d--;
      }
    }
  }
  parent_[i] = a0_min;
  if (a0_min != kNone) {
    ts_[i] = time_;
    dist_[i] = d_min + 1;
    return;
  }
  for (int a0 = first_[i]; a0 != kNone; a0 = next_[a0]) {
    const int j = head_[a0];
    const int a = parent_[j];
    if (is_sink_[j] || a == kNone) continue;
    if (res_[sister_[a0]] > 0) set_active(j);
    if (a != kTerminal && a != kOrphan && head_[a] == i) {
      parent_[j] = kOrphan;
      orphans_.push_back(j);
    }
  }
}

void MaxFlow::process_sink_orphan(int i) {
  constexpr int kInf = std::numeric_limits<int>::max();
  int a0_min = kNone;
  int d_min = kInf;
  for (int a0 = first_[i]; a0 != kNone; a0 = next_[a0]) {
    if (res_[a0] == 0) continue;
    int j = head_[a0];
    if (!is_sink_[j] || parent_[j] == kNone) continue;
    int d = 0;
    while (true) {
      if (ts_[j] == time_) {
        d += dist_[j];
        break;
      }
      const int a = parent_[j];
      ++d;
      if (a == kTerminal) {
        ts_[j] = time_;
        dist_[j] = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInf;
        break;
      }
      j = head_[a];
    }
    if (d < kInf) {
      if (d < d_min) {
        a0_min = a0;
        d_min = d;
      }
      for (j = head_[a0]; ts_[j] != time_; j = head_[parent_[j]]) {
        ts_[j] = time_;
        dist_[j] = d--;
      }
    }
  }
  parent_[i] = a0_min;
  if (a0_min != kNone) {
    ts_[i] = time_;
    dist_[i] = d_min + 1;
    return;
  }
  for (int a0 = first_[i]; a0 != kNone; a0 = next_[a0]) {
    const int j = head_[a0];
    const int a = parent_[j];
    if (!is_sink_[j] || a == kNone) continue;
    if (res_[a0] > 0) set_active(j);
    if (a != kTerminal && a != kOrphan && head_[a] == i) {
      parent_[j] = kOrphan;
      orphans_.push_back(j);
    }
  }
}

MaxFlow::Capacity MaxFlow::solve() {
  const int n = num_nodes();
  res_ = cap_;
  flow_ = 0;
  time_ = 0;
  active_.clear();
  active_head_ = 0;
  for (int i = 0; i < n; ++i) {
    const Capacity m = std::min(src_cap_[i], sink_cap_[i]);
    flow_ += m;
    src_res_[i] = src_cap_[i] - m;
    sink_res_[i] = sink_cap_[i] - m;
    in_active_[i] = 0;
    ts_[i] = 0;
    if (src_res_[i] > 0) {
      is_sink_[i] = 0;
      parent_[i] = kTerminal;
      dist_[i] = 1;
      set_active(i);
    } else if (sink_res_[i] > 0) {
      is_sink_[i] = 1;
      parent_[i] = kTerminal;
      dist_[i] = 1;
      set_active(i);
    } else {
      parent_[i] = kNone;
    }
  }

  int current = kNone;
  while (true) {
    int i = current;
    if (i != kNone) {
      in_active_[i] = 0;
      if (parent_[i] == kNone) i = kNone;
    }
    if (i == kNone) {
      i = next_active();
      if (i == kNone) break;
    }

    int middle = kNone;
    if (!is_sink_[i]) {
      for (int a = first_[i]; a != kNone; a = next_[a]) {
        if (res_[a] == 0) continue;
        const int j = head_[a];
        if (parent_[j] == kNone) {
          is_sink_[j] = 0;
          parent_[j] = sister_[a];
          ts_[j] = ts_[i];
          dist_[j] = dist_[i] + 1;
          set_active(j);
        } else if (is_sink_[j]) {
          middle = a;
          break;
        } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
          parent_[j] = sister_[a];
          ts_[j] = ts_[i];
          dist_[j] = dist_[i] + 1;
        }
      }
    } else {
      for (int a = first_[i]; a != kNone; a = next_[a]) {
        if (res_[sister_[a]] == 0) continue;
        const int j = head_[a];
        if (parent_[j] == kNone) {
          is_sink_[j] = 1;
          parent_[j] = sister_[a];
          ts_[j] = ts_[i];
          dist_[j] = dist_[i] + 1;
          set_active(j);
        } else if (!is_sink_[j]) {
          middle = sister_[a];
          break;
        } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
          parent_[j] = sister_[a];
          ts_[j] = ts_[i];
          dist_[j] = dist_[i] + 1;
        }
      }
    }

    ++time_;
    if (middle != kNone) {
      in_active_[i] = 1;  // keep i from being queued twice while it is current
      current = i;
      augment(middle);
      // Orphans from augment go to the front (most recent first), adoption
      // failures to the rear.
      while (!orphan_front_.empty() || orphan_head_ < orphans_.size()) {
        int o;
        if (!orphan_front_.empty()) {
          o = orphan_front_.back();
          orphan_front_.pop_back();
        } else {
          o = orphans_[orphan_head_++];
        }
        if (is_sink_[o]) process_sink_orphan(o);
        else process_source_orphan(o);
      }
      orphans_.clear();
      orphan_head_ = 0;
    } else {
      current = kNone;
    }
  }
  compute_source_side();
  return flow_;
}

void MaxFlow::compute_source_side() {
  const int n = num_nodes();
  source_side_.assign(n, 0);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (src_res_[i] > 0) {
      source_side_[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      const int j = head_[a];
      if (res_[a] > 0 && !source_side_[j]) {
        source_side_[j] = 1;
        stack.push_back(j);
      }
    }
  }
}

MaxFlow::Certificate MaxFlow::certify() const {
  Certificate c;
  const int n = num_nodes();
  c.capacity_ok = true;
  for (std::size_t a = 0; a < res_.size(); ++a) {
    const auto s = static_cast<std::size_t>(sister_[a]);
    if (res_[a] < 0 || res_[a] + res_[s] != cap_[a] + cap_[s]) c.capacity_ok = false;
  }
  for (int i = 0; i < n; ++i) {
    if (src_res_[i] < 0 || src_res_[i] > src_cap_[i]) c.capacity_ok = false;
    if (sink_res_[i] < 0 || sink_res_[i] > sink_cap_[i]) c.capacity_ok = false;
  }
  c.conservation_ok = true;
  Capacity from_source = 0;
  Capacity into_sink = 0;
  for (int i = 0; i < n; ++i) {
    const Capacity fs = src_cap_[i] - src_res_[i];
    const Capacity ft = sink_cap_[i] - sink_res_[i];
    from_source += fs;
    into_sink += ft;
    Capacity out = 0;
    for (int a = first_[i]; a != kNone; a = next_[a]) {
      out += cap_[a] - res_[a];
    }
    if (fs - ft - out != 0) c.conservation_ok = false;
  }
  if (from_source != into_sink || from_source != flow_) c.conservation_ok = false;
  c.flow_value = from_source;

  Capacity cut = 0;
  for (int i = 0; i < n; ++i) {
    if (source_side_[i]) {
      cut += sink_cap_[i];
      for (int a = first_[i]; a != kNone; a = next_[a]) {
        if (!source_side_[head_[a]]) cut += cap_[a];
      }
    } else {
      cut += src_cap_[i];
    }
  }
  c.cut_capacity = cut;
  return c;
}

}  // namespace hfrac
