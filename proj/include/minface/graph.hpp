#pragma once

// Specification patterns for partial symmetric matrices. A pattern is an
// undirected graph on 0-based vertices whose edges mark the specified entries;
// a loop {i,i} marks a specified diagonal entry. Loop vertices play a special
// role throughout: L is the set of looped vertices, and several results depend
// on whether any edge joins L to its complement.

#include <algorithm>
#include <array>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace minface {

using Edge = std::pair<int, int>;  // normalized: first <= second

struct PatternGraph {
  int n = 0;
  std::vector<Edge> edges;            // canonical order: i <= j, lexicographic, unique
  std::vector<int> loops;             // ascending
  std::vector<std::vector<int>> adj;  // non-loop adjacency, ascending

  bool has_loop(int v) const {
    return std::binary_search(loops.begin(), loops.end(), v);
  }
  int edge_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(edges.begin(), edges.end(), Edge{i, j});
    if (it != edges.end() && *it == Edge{i, j}) return int(it - edges.begin());
    return -1;
  }
  bool has_edge(int i, int j) const { return edge_index(i, j) >= 0; }
  bool loop_free() const { return loops.empty(); }
  int num_edges() const { return int(edges.size()); }
};

inline PatternGraph build_pattern(int n, std::vector<Edge> pairs) {
  if (n < 0) throw std::invalid_argument("build_pattern: negative vertex count");
  for (auto& e : pairs) {
    if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
      throw std::invalid_argument("build_pattern: vertex index out of range for edge {" +
                                  std::to_string(e.first + 1) + "," + std::to_string(e.second + 1) +
                                  "}");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  PatternGraph g;
  g.n = n;
  g.edges = std::move(pairs);
  g.adj.assign(n, {});
  for (const auto& e : g.edges) {
    if (e.first == e.second) {
      g.loops.push_back(e.first);
    } else {
      g.adj[e.first].push_back(e.second);
      g.adj[e.second].push_back(e.first);
    }
  }
  for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
  return g;
}

// Components of the underlying simple graph (loops ignored). Each component is
// ascending; the list is ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const PatternGraph& g) {
  std::vector<std::vector<int>> comps;
  std::vector<char> seen(g.n, 0);
  for (int s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      comp.push_back(v);
      for (int u : g.adj[v])
        if (!seen[u]) {
          seen[u] = 1;
          q.push(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// True iff no edge joins a looped vertex to a loop-free vertex. Equivalent to:
// the looped vertices form a union of connected components.
inline bool l_separated(const PatternGraph& g) {
  for (const auto& e : g.edges) {
    if (e.first == e.second) continue;
    if (g.has_loop(e.first) != g.has_loop(e.second)) return false;
  }
  return true;
}

// First edge in canonical order joining L and its complement; nullopt when
// l_separated holds.
inline std::optional<Edge> first_bridging_edge(const PatternGraph& g) {
  for (const auto& e : g.edges) {
    if (e.first == e.second) continue;
    if (g.has_loop(e.first) != g.has_loop(e.second)) return e;
  }
  return std::nullopt;
}

struct EliminationOrder {
  std::vector<int> order;  // order[k] = k-th eliminated vertex
};

struct ChordalityResult {
  bool chordal = true;
  EliminationOrder order;                 // perfect elimination order iff chordal
  std::vector<int> counterexample_cycle;  // chordless cycle, length >= 4, iff not chordal
};

namespace detail {

// Checks whether `order` eliminates perfectly: for each vertex v, the
// neighbors of v eliminated after v must be pairwise adjacent; it suffices to
// test them against the earliest of them. Returns a violating triple
// (v, u, x): u, x are later neighbors of v with u eliminated first and
// {u,x} not an edge.
inline std::optional<std::array<int, 3>> peo_violation(const PatternGraph& g,
                                                       const std::vector<int>& order) {
  const int n = g.n;
  std::vector<int> pos(n, -1);
  for (int k = 0; k < n; ++k) pos[order[k]] = k;
  for (int k = 0; k < n; ++k) {
    int v = order[k];
    int u = -1;
    for (int w : g.adj[v])
      if (pos[w] > k && (u < 0 || pos[w] < pos[u])) u = w;
    if (u < 0) continue;
    for (int x : g.adj[v]) {
      if (pos[x] <= k || x == u) continue;
      if (!g.has_edge(u, x)) return std::array<int, 3>{v, u, x};
    }
  }
  return std::nullopt;
}

// Given u, x in N(v) with {u,x} not an edge, a shortest u-x path avoiding v
// and all other neighbors of v closes to a chordless cycle through v. Such a
// path need not exist for an arbitrary triple, so callers fall back to
// scanning all triples; any non-chordal graph admits one that works.
inline std::vector<int> cycle_through(const PatternGraph& g, int v, int u, int x) {
  std::vector<char> allowed(g.n, 1);
  allowed[v] = 0;
  for (int w : g.adj[v])
    if (w != u && w != x) allowed[w] = 0;
  std::vector<int> parent(g.n, -2);
  std::queue<int> q;
  q.push(u);
  parent[u] = -1;
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    if (a == x) break;
    for (int b : g.adj[a]) {
      if (!allowed[b] || parent[b] != -2) continue;
      parent[b] = a;
      q.push(b);
    }
  }
  if (parent[x] == -2) return {};
  std::vector<int> path;
  for (int a = x; a != -1; a = parent[a]) path.push_back(a);
  std::reverse(path.begin(), path.end());  // u ... x
  std::vector<int> cycle{v};
  cycle.insert(cycle.end(), path.begin(), path.end());
  return cycle;
}

inline std::vector<int> find_chordless_cycle(const PatternGraph& g,
                                             const std::array<int, 3>& hint) {
  auto c = cycle_through(g, hint[0], hint[1], hint[2]);
  if (c.size() >= 4) return c;
  for (int v = 0; v < g.n; ++v) {
    const auto& nb = g.adj[v];
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (g.has_edge(nb[a], nb[b])) continue;
        c = cycle_through(g, v, nb[a], nb[b]);
        if (c.size() >= 4) return c;
      }
  }
  throw std::logic_error("find_chordless_cycle: no cycle found in a non-chordal graph");
}

}  // namespace detail

// Chordality of the underlying simple graph (loops ignored). Runs maximum
// cardinality search, then verifies the candidate elimination order; on
// failure extracts a chordless cycle of length >= 4 as the counterexample.
inline ChordalityResult is_chordal(const PatternGraph& g) {
  ChordalityResult res;
  const int n = g.n;
  if (n == 0) return res;
  std::vector<int> weight(n, 0), visit;
  std::vector<char> seen(n, 0);
  visit.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!seen[v] && (best < 0 || weight[v] > weight[best])) best = v;
    seen[best] = 1;
    visit.push_back(best);
    for (int u : g.adj[best])
      if (!seen[u]) ++weight[u];
  }
  res.order.order.assign(visit.rbegin(), visit.rend());
  auto bad = detail::peo_violation(g, res.order.order);
  if (!bad) return res;
  res.chordal = false;
  res.order.order.clear();
  res.counterexample_cycle = detail::find_chordless_cycle(g, *bad);
  return res;
}

// Maximal cliques of a chordal graph from a perfect elimination order: each
// vertex contributes itself plus its later neighbors; non-maximal candidates
// are filtered. Cliques are ascending, the list lexicographic. A chordal graph
// has at most n maximal cliques. Loops are ignored.
inline std::vector<std::vector<int>> maximal_cliques_chordal(const PatternGraph& g,
                                                             const EliminationOrder& ord) {
  const int n = g.n;
  if (int(ord.order.size()) != n)
    throw std::invalid_argument("maximal_cliques_chordal: order size mismatch");
  std::vector<char> hit(n, 0);
  for (int v : ord.order) {
    if (v < 0 || v >= n || hit[v])
      throw std::invalid_argument("maximal_cliques_chordal: order is not a permutation");
    hit[v] = 1;
  }
  if (detail::peo_violation(g, ord.order))
    throw std::invalid_argument("maximal_cliques_chordal: order is not a perfect elimination order");
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[ord.order[k]] = k;
  std::vector<std::vector<int>> cands;
  cands.reserve(n);
  for (int v = 0; v < n; ++v) {
    std::vector<int> c{v};
    for (int u : g.adj[v])
      if (pos[u] > pos[v]) c.push_back(u);
    std::sort(c.begin(), c.end());
    cands.push_back(std::move(c));
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  std::vector<std::vector<int>> out;
  for (auto& c : cands) {
    bool contained = false;
    for (const auto& big : out)
      if (std::includes(big.begin(), big.end(), c.begin(), c.end())) {
        contained = true;
        break;
      }
    if (!contained) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct InducedSubgraph {
  PatternGraph graph;
  std::vector<int> vertices;  // vertices[k] = original label of sub-vertex k
};

// Subgraph induced on the looped vertices, keeping loops and inner edges.
inline InducedSubgraph induced_on_loops(const PatternGraph& g) {
  InducedSubgraph s;
  s.vertices = g.loops;
  std::vector<int> to_sub(g.n, -1);
  for (int k = 0; k < int(s.vertices.size()); ++k) to_sub[s.vertices[k]] = k;
  std::vector<Edge> edges;
  for (const auto& e : g.edges)
    if (to_sub[e.first] >= 0 && to_sub[e.second] >= 0)
      edges.push_back({to_sub[e.first], to_sub[e.second]});
  s.graph = build_pattern(int(s.vertices.size()), std::move(edges));
  return s;
}

}  // namespace minface
