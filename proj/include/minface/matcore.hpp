#pragma once

// Core operators and face representations for partial-matrix completion.
//
// A PartialMatrix pairs a pattern with the specified values in canonical edge
// order. project / adjoint_project realize the coordinate projection P onto
// the specified entries and its adjoint P* (zero-fill), adjoint under the
// trace inner product on one side and the edge inner product, which doubles
// off-diagonal terms, on the other.
//
// The distance operators connect Gram matrices and squared-distance matrices:
//   kappa(X)_ij      = X_ii + X_jj - 2 X_ij           (hollow output)
//   kappa_adjoint(D) = 2 (Diag(De) - D)               (centered output)
//   kappa_pinv(D)    = -(1/2) J D J,  J = I - ee^T/n  (centered output)
// kappa_pinv inverts kappa between the centered symmetric matrices and the
// hollow ones. laplacian(a) = Diag(P*(a) e) - P*(a) is the weighted graph
// Laplacian of the values.
//
// A FaceRep describes a face of the PSD cone (ambient Full) or of its centered
// slice {X >= 0 : Xe = 0} (ambient Centered): an orthonormal range basis U
// plus the canonical exposing projector Y onto the orthogonal complement
// (taken within e-perp when centered). Members of the face are exactly the
// matrices U Z U^T with Z PSD.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "symmat.hpp"

namespace minface {

enum class Cone { PSD, EDM };
enum class Ambient { Full, Centered };

struct RankTolerance {
  double rel_tol = 1e-9;  // eigenvalue counts toward the rank iff > rel_tol * max(lambda_max, 1)
};

struct PartialMatrix {
  PatternGraph pattern;
  std::vector<double> values;  // aligned with pattern.edges

  double value_at(int i, int j) const {
    int k = pattern.edge_index(i, j);
    if (k < 0)
      throw std::invalid_argument("PartialMatrix: entry {" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + "} is not specified");
    return values[std::size_t(k)];
  }
};

inline PartialMatrix make_partial(PatternGraph g, std::vector<double> values) {
  if (values.size() != g.edges.size())
    throw std::invalid_argument("make_partial: " + std::to_string(values.size()) +
                                " values for " + std::to_string(g.edges.size()) + " edges");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("make_partial: non-finite value");
  return PartialMatrix{std::move(g), std::move(values)};
}

inline PartialMatrix project(const SymMatrix& X, const PatternGraph& g) {
  if (X.size() != g.n) throw std::invalid_argument("project: dimension mismatch");
  std::vector<double> vals;
  vals.reserve(g.edges.size());
  for (const auto& e : g.edges) vals.push_back(X(e.first, e.second));
  return PartialMatrix{g, std::move(vals)};
}

inline SymMatrix adjoint_project(const PartialMatrix& a) {
  SymMatrix X(a.pattern.n);
  for (std::size_t k = 0; k < a.pattern.edges.size(); ++k)
    X.set(a.pattern.edges[k].first, a.pattern.edges[k].second, a.values[k]);
  return X;
}

// Restriction of a partial matrix to an induced subgraph (all sub-edges are
// edges of the original pattern by construction).
inline PartialMatrix restrict_partial(const PartialMatrix& a, const InducedSubgraph& sub) {
  std::vector<double> vals;
  vals.reserve(sub.graph.edges.size());
  for (const auto& e : sub.graph.edges)
    vals.push_back(a.value_at(sub.vertices[e.first], sub.vertices[e.second]));
  return PartialMatrix{sub.graph, std::move(vals)};
}

// Edge inner product: loops count once, off-diagonal edges twice. With this
// pairing, adjoint_project is the adjoint of project.
inline double edge_inner(const PatternGraph& g, const std::vector<double>& u,
                         const std::vector<double>& v) {
  if (u.size() != g.edges.size() || v.size() != g.edges.size())
    throw std::invalid_argument("edge_inner: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    double t = u[k] * v[k];
    s += (g.edges[k].first == g.edges[k].second) ? t : 2.0 * t;
  }
  return s;
}

inline double edge_inner(const PartialMatrix& a, const PartialMatrix& b) {
  return edge_inner(a.pattern, a.values, b.values);
}

inline double edge_norm(const PartialMatrix& a) {
  return std::sqrt(edge_inner(a.pattern, a.values, a.values));
}

inline SymMatrix kappa(const SymMatrix& X) {
  const int n = X.size();
  SymMatrix D(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) D.set(i, j, X(i, i) + X(j, j) - 2.0 * X(i, j));
  return D;  // diagonal cancels exactly
}

inline SymMatrix kappa_adjoint(const SymMatrix& D) {
  const int n = D.size();
  Eigen::VectorXd d = D.dense().rowwise().sum();
  Eigen::MatrixXd R = -2.0 * D.dense();
  R.diagonal() += 2.0 * d;
  return SymMatrix::from_dense(R, 0.0);  // bitwise symmetric already
}

// -(1/2) J D J on hollow D. The output is centered to roundoff.
inline SymMatrix kappa_pinv(const SymMatrix& D, RankTolerance tol = {}) {
  const int n = D.size();
  if (n == 0) return D;
  double diag_max = D.dense().diagonal().cwiseAbs().maxCoeff();
  if (diag_max > tol.rel_tol * std::max(1.0, D.max_abs()))
    throw std::invalid_argument("kappa_pinv: matrix is not hollow within tolerance (max |diagonal| " +
                                std::to_string(diag_max) + ")");
  Eigen::VectorXd c = D.dense().rowwise().sum() / double(n);
  double s = c.sum() / double(n);
  SymMatrix B(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) B.set(i, j, -0.5 * (D(i, j) - (c(i) + c(j)) + s));
  return B;
}

inline SymMatrix laplacian(const PartialMatrix& a) {
  SymMatrix A = adjoint_project(a);
  const int n = A.size();
  Eigen::VectorXd d = A.dense().rowwise().sum();
  Eigen::MatrixXd R = -A.dense();
  R.diagonal() += d;
  return SymMatrix::from_dense(R, 0.0);
}

namespace detail {

struct EigSym {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

inline EigSym eig_sym(const Eigen::MatrixXd& M) {
  if (M.rows() == 0) return EigSym{Eigen::VectorXd(), Eigen::MatrixXd(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_sym: eigendecomposition failed");
  return EigSym{es.eigenvalues(), es.eigenvectors()};
}

inline double rank_cutoff(const Eigen::VectorXd& evals, RankTolerance tol) {
  double lmax = evals.size() > 0 ? std::max(evals.maxCoeff(), 0.0) : 0.0;
  return tol.rel_tol * std::max(lmax, 1.0);
}

inline bool psd_within(const Eigen::VectorXd& evals, double rel) {
  if (evals.size() == 0) return true;
  double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  return evals.minCoeff() >= -rel * scale;
}

inline Eigen::MatrixXd centering_projector(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  J.array() -= 1.0 / double(n);
  return J;
}

inline void check_centered(const SymMatrix& X, RankTolerance tol, const char* who) {
  const int n = X.size();
  if (n == 0) return;
  double drift = (X.dense() * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
  if (drift > tol.rel_tol * std::max(1.0, X.max_abs()) * double(n))
    throw std::invalid_argument(std::string(who) + ": matrix is not centered within tolerance (|Xe| " +
                                std::to_string(drift) + ")");
}

}  // namespace detail

// Numerical rank with the shared cutoff rule.
inline int numerical_rank(const SymMatrix& X, RankTolerance tol = {}) {
  if (X.size() == 0) return 0;
  Eigen::VectorXd ev = X.eigenvalues();
  double cut = detail::rank_cutoff(ev, tol);
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) ++r;
  return r;
}

struct FaceRep {
  int n = 0;
  Ambient ambient = Ambient::Full;
  Eigen::MatrixXd basis;  // n x r, orthonormal; centered: columns orthogonal to ones
  SymMatrix exposing;     // projector onto the complement (within e-perp when centered)

  int rank() const { return int(basis.cols()); }
  int ambient_max_rank() const {
    return ambient == Ambient::Full ? n : std::max(n - 1, 0);
  }
};

namespace detail {

inline SymMatrix canonical_exposer(int n, Ambient amb, const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose();
  if (amb == Ambient::Centered && n > 0) Y.array() -= 1.0 / double(n);
  return SymMatrix::symmetrized(Y);
}

}  // namespace detail

inline FaceRep full_face(int n, Ambient amb) {
  if (n < 0) throw std::invalid_argument("full_face: negative dimension");
  FaceRep f;
  f.n = n;
  f.ambient = amb;
  if (amb == Ambient::Full) {
    f.basis = Eigen::MatrixXd::Identity(n, n);
  } else if (n > 0) {
    // Complete ones/sqrt(n) to an orthonormal basis; drop the ones direction.
    Eigen::MatrixXd e = Eigen::MatrixXd::Ones(n, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    f.basis = Q.rightCols(n - 1);
  } else {
    f.basis = Eigen::MatrixXd(0, 0);
  }
  f.exposing = SymMatrix(n);
  return f;
}

// Smallest face of the ambient cone containing a given PSD matrix: the span of
// its numerically nonzero eigenvectors. Errors if X is not PSD within
// tolerance, or (centered ambient) not centered.
inline FaceRep face_of_psd(const SymMatrix& X, RankTolerance tol = {}, Ambient amb = Ambient::Full) {
  const int n = X.size();
  Eigen::MatrixXd work;
  if (amb == Ambient::Centered) {
    detail::check_centered(X, tol, "face_of_psd");
    if (n > 0) {
      Eigen::MatrixXd J = detail::centering_projector(n);
      work = SymMatrix::symmetrized(J * X.dense() * J).dense();
    } else {
      work = X.dense();
    }
  } else {
    work = X.dense();
  }
  auto es = detail::eig_sym(work);
  if (!detail::psd_within(es.values, tol.rel_tol))
    throw std::domain_error("face_of_psd: matrix is not positive semidefinite within tolerance (min eigenvalue " +
                            std::to_string(es.values.size() ? es.values.minCoeff() : 0.0) + ")");
  double cut = detail::rank_cutoff(es.values, tol);
  std::vector<int> keep;
  for (int i = 0; i < es.values.size(); ++i)
    if (es.values(i) > cut) keep.push_back(i);
  FaceRep f;
  f.n = n;
  f.ambient = amb;
  f.basis = Eigen::MatrixXd(n, int(keep.size()));
  for (int c = 0; c < int(keep.size()); ++c) f.basis.col(c) = es.vectors.col(keep[c]);
  f.exposing = detail::canonical_exposer(n, amb, f.basis);
  return f;
}

// Face exposed by a PSD matrix Y: members are the PSD matrices whose range
// lies in the null space of Y (intersected with e-perp when centered). The
// stored exposer is canonicalized to the complement projector, so feeding a
// face's exposer back in reproduces the face.
inline FaceRep face_from_exposing(const SymMatrix& Y, RankTolerance tol = {},
                              Ambient amb = Ambient::Full) {
  const int n = Y.size();
  Eigen::MatrixXd base;
  if (amb == Ambient::Centered) {
    detail::check_centered(Y, tol, "face_from_exposing");
    if (n > 0) {
      Eigen::MatrixXd J = detail::centering_projector(n);
      base = SymMatrix::symmetrized(J * Y.dense() * J).dense();
    } else {
      base = Y.dense();
    }
  } else {
    base = Y.dense();
  }
  auto es0 = detail::eig_sym(base);
  if (!detail::psd_within(es0.values, tol.rel_tol))
    throw std::domain_error("face_from_exposing: exposer is not positive semidefinite within tolerance (min eigenvalue " +
                            std::to_string(es0.values.size() ? es0.values.minCoeff() : 0.0) + ")");
  double cut = detail::rank_cutoff(es0.values, tol);
  FaceRep f;
  f.n = n;
  f.ambient = amb;
  if (amb == Ambient::Full) {
    std::vector<int> keep;
    for (int i = 0; i < es0.values.size(); ++i)
      if (es0.values(i) <= cut) keep.push_back(i);
    f.basis = Eigen::MatrixXd(n, int(keep.size()));
    for (int c = 0; c < int(keep.size()); ++c) f.basis.col(c) = es0.vectors.col(keep[c]);
  } else if (n > 0) {
    // Shift the ones direction out of the null space, then read off the rest.
    double lmax = es0.values.size() ? std::max(es0.values.maxCoeff(), 0.0) : 0.0;
    double shift = 2.0 * std::max(lmax, 1.0);
    Eigen::MatrixXd M = base;
    M.array() += shift / double(n);
    auto es = detail::eig_sym(M);
    std::vector<int> keep;
    for (int i = 0; i < es.values.size(); ++i)
      if (es.values(i) <= cut) keep.push_back(i);
    f.basis = Eigen::MatrixXd(n, int(keep.size()));
    for (int c = 0; c < int(keep.size()); ++c) f.basis.col(c) = es.vectors.col(keep[c]);
  } else {
    f.basis = Eigen::MatrixXd(0, 0);
  }
  f.exposing = detail::canonical_exposer(n, amb, f.basis);
  return f;
}

// Intersection of the faces exposed by a family of PSD matrices: exposed by
// their sum. An empty family yields the whole cone.
inline FaceRep intersect_faces(const std::vector<SymMatrix>& exposers, int n,
                            RankTolerance tol = {}, Ambient amb = Ambient::Full) {
  if (exposers.empty()) return full_face(n, amb);
  SymMatrix S(n);
  for (std::size_t k = 0; k < exposers.size(); ++k) {
    const SymMatrix& Y = exposers[k];
    if (Y.size() != n)
      throw std::invalid_argument("intersect_faces: exposer " + std::to_string(k) + " has wrong dimension");
    if (!detail::psd_within(Y.eigenvalues(), tol.rel_tol))
      throw std::domain_error("intersect_faces: exposer " + std::to_string(k) +
                              " is not positive semidefinite within tolerance");
    S += Y;
  }
  return face_from_exposing(S, tol, amb);
}

inline FaceRep intersect_faces(const std::vector<FaceRep>& faces, RankTolerance tol = {}) {
  if (faces.empty()) throw std::invalid_argument("intersect_faces: empty face list");
  std::vector<SymMatrix> ys;
  ys.reserve(faces.size());
  for (const auto& f : faces) {
    if (f.n != faces.front().n || f.ambient != faces.front().ambient)
      throw std::invalid_argument("intersect_faces: mismatched faces");
    ys.push_back(f.exposing);
  }
  return intersect_faces(ys, faces.front().n, tol, faces.front().ambient);
}

}  // namespace minface
