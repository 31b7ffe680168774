#pragma once

// Shared test utilities: seeded generators for graphs and planted instances,
// plus slow-but-independent oracles used to cross-check the library.
//
// Numeric test data lives on the dyadic grid {k/64 : k integer, |k| <= 128}.
// Products and small sums of such values are exactly representable in double,
// so identities that are algebraically exact can be asserted bitwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include <minface/minface.hpp>

namespace testsupport {

using minface::Edge;
using minface::PartialMatrix;
using minface::PatternGraph;

using Rng = std::mt19937_64;

// Uniform dyadic value in [-2, 2] with denominator 64.
inline double dyadic(Rng& rng) {
  std::uniform_int_distribution<int> d(-128, 128);
  return double(d(rng)) / 64.0;
}

inline Eigen::MatrixXd dyadic_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = dyadic(rng);
  return M;
}

inline minface::SymMatrix dyadic_symmetric(Rng& rng, int n) {
  minface::SymMatrix X(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) X.set(i, j, dyadic(rng));
  return X;
}

inline minface::SymMatrix dyadic_hollow(Rng& rng, int n) {
  minface::SymMatrix X(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) X.set(i, j, dyadic(rng));
  return X;
}

// Random pattern graph: each vertex pair kept with probability p_edge, each
// loop with probability p_loop.
inline PatternGraph random_pattern(Rng& rng, int n, double p_edge, double p_loop) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    if (u(rng) < p_loop) edges.push_back({i, i});
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < p_edge) edges.push_back({i, j});
  }
  return minface::build_pattern(n, edges);
}

// Random k-tree on n >= k+1 vertices: seed clique of size k+1, then each new
// vertex is joined to a uniformly chosen k-subset of an existing (k+1)-clique.
// k-trees are chordal and their maximal cliques all have size k+1.
inline PatternGraph random_ktree(Rng& rng, int n, int k, bool with_loops) {
  std::vector<std::vector<int>> cliques;  // (k+1)-cliques grown so far
  std::vector<Edge> edges;
  std::vector<int> seed(k + 1);
  std::iota(seed.begin(), seed.end(), 0);
  cliques.push_back(seed);
  for (int i = 0; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) edges.push_back({i, j});
  for (int v = k + 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, cliques.size() - 1);
    std::vector<int> base = cliques[pick(rng)];
    std::shuffle(base.begin(), base.end(), rng);
    std::vector<int> sub(base.begin(), base.begin() + k);
    for (int u : sub) edges.push_back({u, v});
    sub.push_back(v);
    std::sort(sub.begin(), sub.end());
    cliques.push_back(sub);
  }
  if (with_loops)
    for (int i = 0; i < n; ++i) edges.push_back({i, i});
  return minface::build_pattern(n, edges);
}

// Entries of a planted Gram matrix W W^T with dyadic W, projected onto g.
// All specified values are exact dyadic sums.
inline PartialMatrix planted_psd_instance(Rng& rng, const PatternGraph& g, int rank,
                                          Eigen::MatrixXd* factor = nullptr) {
  Eigen::MatrixXd W = dyadic_matrix(rng, g.n, rank);
  if (factor) *factor = W;
  std::vector<double> values;
  values.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) values.push_back(W.row(i).dot(W.row(j)));
  return minface::make_partial(g, values);
}

// Squared distances of planted points (rows of P), projected onto loop-free g.
inline PartialMatrix planted_edm_instance(Rng& rng, const PatternGraph& g, int dim,
                                          Eigen::MatrixXd* points = nullptr) {
  Eigen::MatrixXd P = dyadic_matrix(rng, g.n, dim);
  if (points) *points = P;
  std::vector<double> values;
  values.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) values.push_back((P.row(i) - P.row(j)).squaredNorm());
  return minface::make_partial(g, values);
}

// Independent chordality oracle: repeatedly delete a simplicial vertex (one
// whose neighborhood is a clique); a graph is chordal iff this empties it.
inline bool chordal_by_elimination(const PatternGraph& g) {
  std::vector<std::set<int>> adj(g.n);
  for (const auto& [i, j] : g.edges)
    if (i != j) {
      adj[i].insert(j);
      adj[j].insert(i);
    }
  std::vector<bool> alive(g.n, true);
  for (int step = 0; step < g.n; ++step) {
    int found = -1;
    for (int v = 0; v < g.n && found < 0; ++v) {
      if (!alive[v]) continue;
      bool simplicial = true;
      for (int x : adj[v]) {
        if (!alive[x]) continue;
        for (int y : adj[v]) {
          if (!alive[y] || y <= x) continue;
          if (!adj[x].count(y)) {
            simplicial = false;
            break;
          }
        }
        if (!simplicial) break;
      }
      if (simplicial) found = v;
    }
    if (found < 0) return false;
    alive[found] = false;
    for (int x : adj[found]) adj[x].erase(found);
  }
  return true;
}

// Largest principal angle (radians) between the column spaces of A and B.
inline double principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) return M_PI / 2.0;
  if (A.cols() == 0) return 0.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(A), qb(B);
  Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd Qb = qb.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
  // Measure through the sine: the cosine formulation cannot resolve angles
  // below sqrt(machine eps) between near-identical spans.
  Eigen::MatrixXd R = Qb - Qa * (Qa.transpose() * Qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  return std::asin(std::clamp(smax, 0.0, 1.0));
}

// True when the columns of B lie in the column space of full-column-rank A.
inline bool subspace_of(const Eigen::MatrixXd& B, const Eigen::MatrixXd& A, double tol) {
  if (B.cols() == 0) return true;
  if (A.cols() == 0) return B.norm() <= tol;
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(A);
  Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd R = B - Qa * (Qa.transpose() * B);
  return R.cwiseAbs().maxCoeff() <= tol * std::max(1.0, B.cwiseAbs().maxCoeff());
}

// All pattern graphs on n vertices, every subset of loops and edges.
inline std::vector<PatternGraph> all_patterns(int n) {
  std::vector<Edge> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) slots.push_back({i, j});
  std::vector<PatternGraph> out;
  out.reserve(std::size_t(1) << slots.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << slots.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < slots.size(); ++k)
      if (mask >> k & 1) edges.push_back(slots[k]);
    out.push_back(minface::build_pattern(n, edges));
  }
  return out;
}

}  // namespace testsupport
