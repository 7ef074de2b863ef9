#include <doctest.h>

#include <algorithm>
#include <climits>
#include <queue>
#include <random>
#include <vector>

#include "hfrac/maxflow.hpp"

using hfrac::MaxFlow;
using Cap = MaxFlow::Capacity;

namespace {

struct Arc {
  int a, b;
  Cap ab, ba;
};
struct Terminal {
  int node;
  Cap s, t;
};

// Oracle: Edmonds-Karp on an adjacency matrix with explicit source/sink.
Cap edmonds_karp(int n, const std::vector<Arc>& arcs, const std::vector<Terminal>& terms) {
  const int S = n, T = n + 1, N = n + 2;
  std::vector<std::vector<Cap>> cap(N, std::vector<Cap>(N, 0));
  for (const auto& e : arcs) {
    if (e.a == e.b) continue;
    cap[e.a][e.b] += e.ab;
    cap[e.b][e.a] += e.ba;
  }
  for (const auto& t : terms) {
    cap[S][t.node] += t.s;
    cap[t.node][T] += t.t;
  }
  Cap flow = 0;
  while (true) {
    std::vector<int> prev(N, -1);
    prev[S] = S;
    std::queue<int> q;
    q.push(S);
    while (!q.empty() && prev[T] < 0) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < N; ++v) {
        if (prev[v] < 0 && cap[u][v] > 0) {
          prev[v] = u;
          q.push(v);
        }
      }
    }
    if (prev[T] < 0) return flow;
    Cap b = LLONG_MAX;
    for (int v = T; v != S; v = prev[v]) b = std::min(b, cap[prev[v]][v]);
    for (int v = T; v != S; v = prev[v]) {
      cap[prev[v]][v] -= b;
      cap[v][prev[v]] += b;
    }
    flow += b;
  }
}

// Oracle: enumerate every source side.
Cap brute_force_cut(int n, const std::vector<Arc>& arcs, const std::vector<Terminal>& terms) {
  Cap best = LLONG_MAX;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    auto in = [&](int v) { return ((mask >> v) & 1u) != 0; };
    Cap c = 0;
    for (const auto& e : arcs) {
      if (in(e.a) && !in(e.b)) c += e.ab;
      if (in(e.b) && !in(e.a)) c += e.ba;
    }
    for (const auto& t : terms) c += in(t.node) ? t.t : t.s;
    best = std::min(best, c);
  }
  return best;
}

struct Instance {
  int n;
  std::vector<Arc> arcs;
  std::vector<Terminal> terms;
};

Instance random_instance(std::mt19937_64& rng, int n, int m, Cap max_cap) {
  Instance in{n, {}, {}};
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_int_distribution<Cap> cap(0, max_cap);
  for (int k = 0; k < m; ++k) in.arcs.push_back({node(rng), node(rng), cap(rng), cap(rng)});
  for (int v = 0; v < n; ++v) {
    if (rng() % 3 == 0) in.terms.push_back({v, cap(rng), cap(rng)});
  }
  return in;
}

MaxFlow build(const Instance& in) {
  MaxFlow mf(in.n);
  for (const auto& e : in.arcs) mf.add_edge(e.a, e.b, e.ab, e.ba);
  for (const auto& t : in.terms) mf.add_terminal(t.node, t.s, t.t);
  return mf;
}

}  // namespace

TEST_CASE("max flow agrees with brute-force min cut on small graphs") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 300; ++it) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto in = random_instance(rng, n, 3 * n, 9);
    auto mf = build(in);
    const Cap f = mf.solve();
    CHECK(f == brute_force_cut(in.n, in.arcs, in.terms));
    const auto cert = mf.certify();
    CHECK(cert.optimal());
    CHECK(cert.flow_value == f);
  }
}

TEST_CASE("max flow agrees with Edmonds-Karp on medium graphs") {
  std::mt19937_64 rng(202);
  for (int it = 0; it < 60; ++it) {
    const int n = 20 + static_cast<int>(rng() % 80);
    const auto in = random_instance(rng, n, 4 * n, 1 << 20);
    auto mf = build(in);
    const Cap f = mf.solve();
    CHECK(f == edmonds_karp(in.n, in.arcs, in.terms));
    CHECK(mf.certify().optimal());
  }
}

TEST_CASE("grid graph flow certificate") {
  const int w = 40;
  MaxFlow mf(w * w);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Cap> cap(0, 1000);
  std::vector<Arc> arcs;
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < w; ++i) {
      const int v = j * w + i;
      if (i + 1 < w) {
        const Cap c = cap(rng);
        mf.add_edge(v, v + 1, c, c);
      }
      if (j + 1 < w) {
        const Cap c = cap(rng);
        mf.add_edge(v, v + w, c, c);
      }
    }
  }
  const Cap inf = Cap{1} << 50;
  for (int i = 0; i < w; ++i) {
    mf.add_terminal(i, inf, 0);
    mf.add_terminal((w - 1) * w + i, 0, inf);
  }
  const Cap f = mf.solve();
  const auto cert = mf.certify();
  CHECK(cert.optimal());
  CHECK(f < inf);
  for (int i = 0; i < w; ++i) {
    CHECK(mf.source_side()[i] == 1);
    CHECK(mf.source_side()[(w - 1) * w + i] == 0);
  }
}

TEST_CASE("empty and degenerate graphs") {
  MaxFlow none(3);
  CHECK(none.solve() == 0);
  CHECK(none.certify().optimal());
  MaxFlow direct(1);
  direct.add_terminal(0, 5, 3);
  CHECK(direct.solve() == 3);
  CHECK(direct.certify().optimal());
}
