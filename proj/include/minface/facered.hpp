#pragma once

// Clique facial reduction. When the specified entries of a partial matrix
// cover a clique chi, the block a_chi pins down a face of the ambient cone
// that must contain every completion:
//   PSD data: a completion X has X_chi = a_chi, so range(X_chi) = range(a_chi)
//     bounds the rows of X at chi; the face is exposed by the projector onto
//     null(a_chi), lifted into S^n at the chi positions.
//   EDM data: the centered Gram block B = kappa_pinv(a_chi) plays the role of
//     a_chi inside the centered cone; the exposing projector is
//     I - U U^T - ee^T/k for U an orthonormal range basis of B.
// Intersecting the clique faces yields a face containing the whole feasible
// set. On chordal patterns (restricted to the looped vertices for PSD data)
// that intersection is exactly the minimal face, so a single reduction step
// reaches strict feasibility: singularity degree at most one.
//
// aux_certificate repackages the summed exposer as an edge-space vector v with
// 0 != lift(v) PSD and <v, a>_E = 0 -- the auxiliary-system form of the
// reduction step. verify_aux_generic checks such a vector against an
// arbitrary constraint list. max_rank_completion assembles a maximal-rank PSD
// completion via the bordered construction [[X_L, B], [B^T, C + mu I]].

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "matcore.hpp"
#include "solver.hpp"
#include "symmat.hpp"

namespace minface {

struct CliqueExposer {
  std::vector<int> clique;  // sorted vertex labels of chi
  SymMatrix local;          // exposing projector on S^chi
  SymMatrix lifted;         // the same matrix placed at chi x chi in S^n
  Ambient ambient = Ambient::Full;
  int local_rank = 0;       // rank of the exposer; 0 means the block forces nothing
};

enum class SdBound { NotEvaluated, Unknown, Zero, One };

struct AuxCertificate {
  std::vector<Edge> edges;  // canonical pattern edge order; aligns v
  std::vector<double> v;
  SymMatrix lifted;         // adjoint_project(v) for PSD data, laplacian(v) for EDM data
  double inner = 0.0;       // <v, a>_E
  Cone cone = Cone::PSD;
};

struct ReductionReport {
  Cone cone = Cone::PSD;
  FaceRep face;
  std::vector<std::vector<int>> cliques;
  std::vector<CliqueExposer> exposers;
  bool chordal_guarantee = false;  // face is provably the minimal face
  bool slater_holds = false;       // face spans the whole ambient cone
  std::optional<bool> slater_on_face;
  SdBound sd_bound = SdBound::NotEvaluated;
  std::optional<AuxCertificate> certificate;
};

namespace detail {

inline std::string clique_label(const std::vector<int>& chi) {
  std::string s = "{";
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(chi[i] + 1);  // 1-based labels in diagnostics, as in JSON I/O
  }
  return s + "}";
}

inline void check_clique(const PatternGraph& g, const std::vector<int>& chi, bool need_loops,
                         const std::string& who) {
  if (chi.empty()) throw std::invalid_argument(who + ": empty clique");
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i] < 0 || chi[i] >= g.n)
      throw std::invalid_argument(who + ": vertex out of range in clique " + clique_label(chi));
    if (i > 0 && chi[i] <= chi[i - 1])
      throw std::invalid_argument(who + ": clique vertices must be sorted and distinct");
  }
  if (need_loops)
    for (int v : chi)
      if (!g.has_loop(v))
        throw std::invalid_argument(who + ": vertex " + std::to_string(v + 1) + " of clique " +
                                    clique_label(chi) + " has no specified diagonal entry");
  for (std::size_t p = 0; p < chi.size(); ++p)
    for (std::size_t q = p + 1; q < chi.size(); ++q)
      if (!g.has_edge(chi[p], chi[q]))
        throw std::invalid_argument(who + ": " + clique_label(chi) +
                                    " is not a clique of the pattern");
}

inline SymMatrix lift_block(int n, const std::vector<int>& chi, const SymMatrix& local) {
  SymMatrix Y(n);
  const int k = int(chi.size());
  for (int p = 0; p < k; ++p)
    for (int q = p; q < k; ++q) Y.set(chi[p], chi[q], local(p, q));
  return Y;
}

// Cliques used for the reduction: the maximal cliques when the graph is
// chordal, otherwise every proper edge as a 2-clique plus isolated vertices
// as singletons. The fallback cliques are still cliques, so their exposers
// remain valid; only minimality of the intersected face is lost.
inline std::vector<std::vector<int>> cover_cliques(const PatternGraph& g,
                                                   const ChordalityResult& ch) {
  if (ch.chordal) return maximal_cliques_chordal(g, ch.order);
  std::vector<std::vector<int>> out;
  std::vector<bool> isolated(std::size_t(g.n), true);
  for (const auto& e : g.edges) {
    if (e.first == e.second) continue;
    isolated[std::size_t(e.first)] = isolated[std::size_t(e.second)] = false;
    out.push_back({e.first, e.second});
  }
  for (int v = 0; v < g.n; ++v)
    if (isolated[std::size_t(v)]) out.push_back({v});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline CliqueExposer clique_exposer_psd(const PartialMatrix& a, const std::vector<int>& chi,
                                        RankTolerance tol = {}) {
  const PatternGraph& g = a.pattern;
  detail::check_clique(g, chi, /*need_loops=*/true, "clique_exposer_psd");
  const int k = int(chi.size());
  SymMatrix block(k);
  for (int p = 0; p < k; ++p)
    for (int q = p; q < k; ++q) block.set(p, q, a.value_at(chi[p], chi[q]));
  Eigen::VectorXd ev = block.eigenvalues();
  if (!detail::psd_within(ev, tol.rel_tol))
    throw std::domain_error("clique_exposer_psd: specified block on clique " +
                            detail::clique_label(chi) +
                            " is not positive semidefinite within tolerance (min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
  FaceRep f = face_of_psd(block, tol, Ambient::Full);
  CliqueExposer ce;
  ce.clique = chi;
  ce.local = f.exposing;
  ce.lifted = detail::lift_block(g.n, chi, f.exposing);
  ce.ambient = Ambient::Full;
  ce.local_rank = k - f.rank();
  return ce;
}

inline CliqueExposer clique_exposer_edm(const PartialMatrix& a, const std::vector<int>& chi,
                                        RankTolerance tol = {}) {
  const PatternGraph& g = a.pattern;
  if (!g.loop_free())
    throw std::invalid_argument("clique_exposer_edm: pattern must be loop-free");
  detail::check_clique(g, chi, /*need_loops=*/false, "clique_exposer_edm");
  const int k = int(chi.size());
  SymMatrix block(k);  // hollow by construction
  for (int p = 0; p < k; ++p)
    for (int q = p + 1; q < k; ++q) block.set(p, q, a.value_at(chi[p], chi[q]));
  SymMatrix B = kappa_pinv(block, tol);
  Eigen::VectorXd ev = B.eigenvalues();
  if (!detail::psd_within(ev, tol.rel_tol))
    throw std::domain_error("clique_exposer_edm: block on clique " + detail::clique_label(chi) +
                            " is not a squared-distance block (centered Gram min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
  FaceRep f = face_of_psd(B, tol, Ambient::Centered);
  CliqueExposer ce;
  ce.clique = chi;
  ce.local = f.exposing;
  ce.lifted = detail::lift_block(g.n, chi, f.exposing);
  ce.ambient = Ambient::Centered;
  ce.local_rank = std::max(k - 1, 0) - f.rank();
  return ce;
}

inline ReductionReport minimal_face_psd(const PartialMatrix& a, RankTolerance tol = {}) {
  const PatternGraph& g = a.pattern;
  InducedSubgraph sub = induced_on_loops(g);
  ChordalityResult ch = is_chordal(sub.graph);
  ReductionReport rpt;
  rpt.cone = Cone::PSD;
  rpt.chordal_guarantee = ch.chordal;
  for (const auto& lc : detail::cover_cliques(sub.graph, ch)) {
    std::vector<int> chi;
    chi.reserve(lc.size());
    for (int v : lc) chi.push_back(sub.vertices[std::size_t(v)]);
    rpt.cliques.push_back(std::move(chi));
  }
  std::vector<SymMatrix> lifted;
  lifted.reserve(rpt.cliques.size());
  for (const auto& chi : rpt.cliques) {
    rpt.exposers.push_back(clique_exposer_psd(a, chi, tol));
    lifted.push_back(rpt.exposers.back().lifted);
  }
  rpt.face = intersect_faces(lifted, g.n, tol, Ambient::Full);
  rpt.slater_holds = rpt.face.rank() == rpt.face.ambient_max_rank();
  return rpt;
}

inline ReductionReport minimal_face_edm(const PartialMatrix& a, RankTolerance tol = {}) {
  const PatternGraph& g = a.pattern;
  if (!g.loop_free())
    throw std::invalid_argument("minimal_face_edm: pattern must be loop-free");
  ChordalityResult ch = is_chordal(g);
  ReductionReport rpt;
  rpt.cone = Cone::EDM;
  rpt.chordal_guarantee = ch.chordal;
  rpt.cliques = detail::cover_cliques(g, ch);
  std::vector<SymMatrix> lifted;
  lifted.reserve(rpt.cliques.size());
  for (const auto& chi : rpt.cliques) {
    rpt.exposers.push_back(clique_exposer_edm(a, chi, tol));
    lifted.push_back(rpt.exposers.back().lifted);
  }
  rpt.face = intersect_faces(lifted, g.n, tol, Ambient::Centered);
  rpt.slater_holds = rpt.face.rank() == rpt.face.ambient_max_rank();
  return rpt;
}

// Assembles the auxiliary-system vector v from the clique exposers: the sum
// Y of the lifted exposers is supported on pattern entries, so it can be read
// back as edge values. For EDM data the exposers live in the centered cone
// and Y is recovered through the Laplacian lift: laplacian(v) with
// v_ij = -1/2 sum of exposer entries reproduces Y up to the harmless global
// factor 1/2. In both cases <v, a>_E telescopes to sums of
// <exposer, block> = 0, so the pairing vanishes up to roundoff.
inline AuxCertificate aux_certificate(const PartialMatrix& a,
                                      const std::vector<CliqueExposer>& exposers,
                                      RankTolerance tol = {}) {
  if (exposers.empty()) throw std::invalid_argument("aux_certificate: no exposers given");
  const Ambient amb = exposers.front().ambient;
  bool any = false;
  for (const auto& ce : exposers) {
    if (ce.ambient != amb) throw std::invalid_argument("aux_certificate: mixed ambients");
    if (ce.local_rank > 0) any = true;
  }
  if (!any)
    throw std::invalid_argument(
        "aux_certificate: every clique exposer is zero; the cliques do not refute strict "
        "feasibility");
  const PatternGraph& g = a.pattern;
  AuxCertificate cert;
  cert.edges = g.edges;
  cert.v.assign(g.edges.size(), 0.0);
  if (amb == Ambient::Full) {
    cert.cone = Cone::PSD;
    SymMatrix Y(g.n);
    for (const auto& ce : exposers) Y += ce.lifted;
    for (std::size_t k = 0; k < g.edges.size(); ++k)
      cert.v[k] = Y(g.edges[k].first, g.edges[k].second);
    cert.lifted = Y;  // entrywise equal to adjoint_project(v): Y is supported on pattern entries
  } else {
    cert.cone = Cone::EDM;
    for (const auto& ce : exposers) {
      const auto& chi = ce.clique;
      for (std::size_t p = 0; p < chi.size(); ++p)
        for (std::size_t q = p + 1; q < chi.size(); ++q) {
          int k = g.edge_index(chi[p], chi[q]);
          cert.v[std::size_t(k)] += -0.5 * ce.local(int(p), int(q));
        }
    }
    cert.lifted = laplacian(PartialMatrix{g, cert.v});
  }
  cert.inner = edge_inner(g, cert.v, a.values);
  // The assembled certificate must satisfy the auxiliary-system conditions;
  // a violation here means a bug upstream, not bad input.
  Eigen::VectorXd ev = cert.lifted.eigenvalues();
  double scale = ev.size() ? std::max(1.0, ev.cwiseAbs().maxCoeff()) : 1.0;
  if (ev.size() == 0 || ev.minCoeff() < -tol.rel_tol * scale ||
      cert.lifted.frob_norm() <= tol.rel_tol)
    throw std::runtime_error("aux_certificate: assembled matrix failed the exposing checks");
  if (std::abs(cert.inner) > tol.rel_tol * edge_norm(a))
    throw std::runtime_error("aux_certificate: pairing <v,a> is not numerically zero (" +
                             std::to_string(cert.inner) + ")");
  return cert;
}

// Auxiliary-system check for an arbitrary constraint list M(X)_k = <A_k, X>:
// true iff sum_k v_k A_k is PSD, nonzero, and orthogonal to b, all within tol.
inline bool verify_aux_generic(const std::vector<SymMatrix>& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& v, double tol = 1e-9) {
  if (long(A.size()) != b.size() || b.size() != v.size())
    throw std::invalid_argument("verify_aux_generic: dimension mismatch");
  if (tol <= 0.0) throw std::invalid_argument("verify_aux_generic: tol must be positive");
  if (A.empty()) return false;
  const int n = A.front().size();
  SymMatrix Y(n);
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (A[k].size() != n) throw std::invalid_argument("verify_aux_generic: mixed dimensions");
    SymMatrix t = A[k];
    t *= v(long(k));
    Y += t;
  }
  Eigen::VectorXd ev = Y.eigenvalues();
  double scale = std::max(1.0, ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
  if (ev.size() && ev.minCoeff() < -tol * scale) return false;
  if (Y.frob_norm() <= tol) return false;
  return std::abs(v.dot(b)) <= tol * std::max(1.0, v.norm() * b.norm());
}

// Maximal-rank PSD completion on a chordal pattern. X_L is a maximal-rank
// completion of the restriction to the looped vertices (sampled in the
// relative interior of its minimal face, so its range contains the range of
// every L-completion); B and C come from any completion of the full data; the
// bordered matrix [[X_L, B], [B^T, C + mu I]] is PSD with rank
// rank(X_L) + |L^c| once mu is large enough.
inline SymMatrix max_rank_completion(const PartialMatrix& a, const ReductionReport& rpt,
                                     RankTolerance tol = {}, const SolverOptions& opt = {},
                                     int trials = 8) {
  if (rpt.cone != Cone::PSD)
    throw std::invalid_argument("max_rank_completion: only PSD reductions are supported");
  if (!rpt.chordal_guarantee)
    throw std::invalid_argument(
        "max_rank_completion: requires the chordal guarantee (minimal face unknown otherwise)");
  const PatternGraph& g = a.pattern;
  const int n = g.n;

  if (int(g.loops.size()) == n) {
    // Every diagonal entry is specified: the relative-interior sample on the
    // minimal face is itself a maximal-rank completion.
    RankSample s = sample_max_rank(a, rpt.face, trials, tol, opt);
    if (rank_of_reduced(s.avg_face, tol) != rpt.face.rank())
      throw UndeterminedError(
          "max_rank_completion: sampled completions did not attain the face rank");
    return s.avg_ambient;
  }

  // Maximal-rank completion of the data restricted to the looped vertices.
  InducedSubgraph sub = induced_on_loops(g);
  SymMatrix XL(0);
  int rank_L = 0;
  if (!sub.vertices.empty()) {
    PartialMatrix aL = restrict_partial(a, sub);
    ReductionReport rptL = minimal_face_psd(aL, tol);
    RankSample sL = sample_max_rank(aL, rptL.face, trials, tol, opt);
    if (rank_of_reduced(sL.avg_face, tol) != rptL.face.rank())
      throw UndeterminedError(
          "max_rank_completion: sampled L-completions did not attain the face rank");
    XL = sL.avg_ambient;
    rank_L = rptL.face.rank();
  }

  // Any completion of the full data, taken deterministically from the zero
  // start (the least-norm feasible point).
  AffineSystem sys = reduce_constraints(a, rpt.face);
  SolveStatus st = ap_solve(sys, opt);
  if (st.outcome == SolveOutcome::Infeasible)
    throw InfeasibleError("max_rank_completion: instance is infeasible (pairing " +
                              std::to_string(st.pairing) + ")",
                          st.certificate.value_or(Eigen::VectorXd()), st.pairing);
  if (st.outcome == SolveOutcome::Undetermined)
    throw UndeterminedError("max_rank_completion: no completion found within max_iter",
                            st.iterations, st.residual);
  Eigen::MatrixXd X_any =
      rpt.face.basis * st.point * rpt.face.basis.transpose();

  // Assemble in L-first order, push the unconstrained diagonal up, undo the
  // permutation.
  std::vector<int> perm = sub.vertices;
  for (int v = 0; v < n; ++v)
    if (!g.has_loop(v)) perm.push_back(v);
  const int nl = int(sub.vertices.size());
  const int nc = n - nl;
  Eigen::MatrixXd top(nl, nl);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j) top(i, j) = XL(i, j);
  Eigen::MatrixXd Bblk(nl, nc), Cblk(nc, nc);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nc; ++j) Bblk(i, j) = X_any(perm[std::size_t(i)], perm[std::size_t(nl + j)]);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j)
      Cblk(i, j) = X_any(perm[std::size_t(nl + i)], perm[std::size_t(nl + j)]);
  const int target = rank_L + nc;
  for (double mu = 1.0; mu <= 1e18; mu *= 2.0) {
    Eigen::MatrixXd W(n, n);
    W.topLeftCorner(nl, nl) = top;
    W.topRightCorner(nl, nc) = Bblk;
    W.bottomLeftCorner(nc, nl) = Bblk.transpose();
    W.bottomRightCorner(nc, nc) = Cblk + mu * Eigen::MatrixXd::Identity(nc, nc);
    SymMatrix Xp = SymMatrix::symmetrized(W);
    if (!detail::psd_within(Xp.eigenvalues(), tol.rel_tol)) continue;
    if (numerical_rank(Xp, tol) != target) continue;
    SymMatrix X(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        int pi = perm[std::size_t(i)], pj = perm[std::size_t(j)];
        X.set(pi, pj, Xp(i, j));
      }
    return X;
  }
  throw UndeterminedError(
      "max_rank_completion: no shift produced a PSD matrix of the expected rank");
}

// Certified singularity-degree bound. On chordal patterns the clique face is
// minimal, so either the data already satisfies Slater (bound 0) or one
// reduction step, witnessed by the auxiliary certificate, lands on a face
// whose relative interior the sampling oracle can reach (bound 1). Without
// chordality the face is only an upper bound and the report says "unknown".
inline ReductionReport singularity_degree_bound(const PartialMatrix& a, Cone cone,
                                                RankTolerance tol = {},
                                                const SolverOptions& opt = {}, int trials = 8) {
  ReductionReport rpt = cone == Cone::PSD ? minimal_face_psd(a, tol) : minimal_face_edm(a, tol);
  if (!rpt.chordal_guarantee) {
    rpt.sd_bound = SdBound::Unknown;
    return rpt;
  }
  if (rpt.slater_holds) {
    // Chordal data with all blocks of full rank is completable with a point
    // in the cone's interior; no reduction step is needed.
    rpt.sd_bound = SdBound::Zero;
    rpt.slater_on_face = true;
    return rpt;
  }
  rpt.certificate = aux_certificate(a, rpt.exposers, tol);
  RankSample s = sample_max_rank(a, rpt.face, trials, tol, opt);
  if (s.avg_face.rows() > 0) {
    // A zero-dimensional face needs no interior point; otherwise the sampled
    // average must sit strictly inside.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.avg_face, Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= opt.tol)
      throw UndeterminedError(
          "singularity_degree_bound: sampled point on the face is not strictly feasible "
          "(min eigenvalue " +
              std::to_string(min_eig) + ")",
          opt.max_iter, min_eig);
  }
  rpt.slater_on_face = true;
  rpt.sd_bound = SdBound::One;
  return rpt;
}

}  // namespace minface
