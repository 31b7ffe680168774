#pragma once

// Closedness of coordinate shadows. The image of the PSD cone under the
// coordinate projection P is closed iff no pattern edge joins a looped vertex
// to a loop-free one (L-separation). When a bridging edge exists, the shadow
// is not closed, and an explicit witness exhibits that: a partial matrix in
// the closure of the image that no PSD matrix projects onto.
//
// The witness places 1 on one bridging edge and 0 everywhere else. It is a
// limit of projected PSD matrices, approached by
//   X(eps, lambda) = P*(a) + eps I on the looped diagonal
//                           + lambda I on the loop-free diagonal,
// which is positive definite for lambda large enough; its projection differs
// from the witness by exactly eps (on the looped diagonal). Yet no completion
// exists: a completion would have a zero diagonal entry next to a nonzero
// off-diagonal entry in the same 2x2 principal block.
//
// The image of the EDM cone (loop-free patterns) is closed for every pattern.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "matcore.hpp"
#include "symmat.hpp"

namespace minface {

struct ClosednessReport {
  Cone cone = Cone::PSD;
  bool closed = true;
  std::optional<Edge> witness_edge;      // first bridging edge when not closed
  std::optional<PartialMatrix> witness;  // witness for that bridge
};

inline PartialMatrix construct_witness(const PatternGraph& g, Edge bridge) {
  int k = g.edge_index(bridge.first, bridge.second);
  if (k < 0) throw std::invalid_argument("construct_witness: bridge is not a pattern edge");
  const Edge e = g.edges[std::size_t(k)];
  if (e.first == e.second || g.has_loop(e.first) == g.has_loop(e.second))
    throw std::invalid_argument("construct_witness: edge does not join a looped vertex to a loop-free one");
  std::vector<double> vals(g.edges.size(), 0.0);
  vals[std::size_t(k)] = 1.0;
  return PartialMatrix{g, std::move(vals)};
}

inline ClosednessReport classify(const PatternGraph& g, Cone cone) {
  ClosednessReport rep;
  rep.cone = cone;
  if (cone == Cone::EDM) {
    if (!g.loop_free())
      throw std::invalid_argument("classify: EDM patterns must be loop-free");
    rep.closed = true;
    return rep;
  }
  rep.closed = l_separated(g);
  if (!rep.closed) {
    rep.witness_edge = first_bridging_edge(g);
    rep.witness = construct_witness(g, *rep.witness_edge);
  }
  return rep;
}

struct WitnessStep {
  double eps = 0.0;
  double lambda = 0.0;   // smallest power of 2 making the Schur complement PD with margin
  double min_eig = 0.0;  // of the perturbed completion X(eps, lambda)
  double proj_err = 0.0; // max |P(X) - a|, equals eps exactly on the looped diagonal
  bool ok = false;
};

struct WitnessCheck {
  Edge bridge{-1, -1};
  int loop_end = -1;       // the looped endpoint of the bridge
  int free_end = -1;       // the loop-free endpoint
  bool certified = false;  // no completion exists (zero diagonal forces zero off-diagonal)
  std::vector<WitnessStep> steps;
  bool all_ok = false;
};

// Verifies that `a` is a closedness witness for `bridge`: checks the witness
// form, records the analytic no-completion certificate, and for each eps
// exhibits a PD matrix whose projection is within eps of `a`.
inline WitnessCheck verify_witness(const PartialMatrix& a, Edge bridge,
                                   const std::vector<double>& eps_seq = {1.0, 0.1, 0.01},
                                   RankTolerance tol = {}) {
  const PatternGraph& g = a.pattern;
  int bk = g.edge_index(bridge.first, bridge.second);
  if (bk < 0) throw std::invalid_argument("verify_witness: bridge is not a pattern edge");
  const Edge e = g.edges[std::size_t(bk)];
  if (e.first == e.second || g.has_loop(e.first) == g.has_loop(e.second))
    throw std::invalid_argument("verify_witness: edge does not join a looped vertex to a loop-free one");
  WitnessCheck chk;
  chk.bridge = e;
  chk.loop_end = g.has_loop(e.first) ? e.first : e.second;
  chk.free_end = g.has_loop(e.first) ? e.second : e.first;
  if (a.values[std::size_t(bk)] == 0.0)
    throw std::invalid_argument("verify_witness: not a witness, bridge value is zero");
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (int(k) == bk) continue;
    if (a.values[k] != 0.0)
      throw std::invalid_argument("verify_witness: not a witness, nonzero value off the bridge at edge {" +
                                  std::to_string(g.edges[k].first + 1) + "," +
                                  std::to_string(g.edges[k].second + 1) + "}");
  }
  // Any completion X has X[loop_end, loop_end] = 0, which in a PSD matrix
  // forces row loop_end to vanish, contradicting the nonzero bridge value.
  chk.certified = true;

  const int n = g.n;
  std::vector<int> Lv = g.loops, Fv;
  for (int v = 0; v < n; ++v)
    if (!g.has_loop(v)) Fv.push_back(v);
  const SymMatrix A = adjoint_project(a);
  chk.all_ok = true;
  for (double eps : eps_seq) {
    if (!(eps > 0.0)) throw std::invalid_argument("verify_witness: eps must be positive");
    WitnessStep step;
    step.eps = eps;
    // Schur complement of the looped block in X(eps, lambda):
    //   S(lambda) = lambda I + A_FF - A_FL (eps I + A_LL)^{-1} A_LF.
    Eigen::MatrixXd ALL(int(Lv.size()), int(Lv.size())), AFF(int(Fv.size()), int(Fv.size())),
        AFL(int(Fv.size()), int(Lv.size()));
    for (int p = 0; p < int(Lv.size()); ++p)
      for (int q = 0; q < int(Lv.size()); ++q) ALL(p, q) = A(Lv[p], Lv[q]);
    for (int p = 0; p < int(Fv.size()); ++p)
      for (int q = 0; q < int(Fv.size()); ++q) AFF(p, q) = A(Fv[p], Fv[q]);
    for (int p = 0; p < int(Fv.size()); ++p)
      for (int q = 0; q < int(Lv.size()); ++q) AFL(p, q) = A(Fv[p], Lv[q]);
    Eigen::MatrixXd XLL = ALL + eps * Eigen::MatrixXd::Identity(ALL.rows(), ALL.cols());
    if (XLL.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esL(XLL, Eigen::EigenvaluesOnly);
      if (esL.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("verify_witness: looped block is not positive definite at eps");
    }
    Eigen::MatrixXd cross = AFL.rows() > 0 && XLL.rows() > 0
                                ? Eigen::MatrixXd(AFL * XLL.inverse() * AFL.transpose())
                                : Eigen::MatrixXd::Zero(AFF.rows(), AFF.cols());
    bool found = false;
    for (int k = 0; k < 64 && !found; ++k) {
      double lambda = std::ldexp(1.0, k);
      Eigen::MatrixXd S = AFF - cross;
      S.diagonal().array() += lambda;
      double smin = 0.0;
      if (S.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esS(S, Eigen::EigenvaluesOnly);
        smin = esS.eigenvalues().minCoeff();
      }
      if (S.rows() == 0 || smin >= tol.rel_tol * std::max(1.0, lambda)) {
        step.lambda = lambda;
        found = true;
      }
    }
    if (!found) throw std::runtime_error("verify_witness: no lambda found, witness data out of range");
    SymMatrix X = A;
    for (int v : Lv) X.add(v, v, eps);
    for (int v : Fv) X.add(v, v, step.lambda);
    step.min_eig = X.min_eigenvalue();
    PartialMatrix pX = project(X, g);
    double err = 0.0;
    for (std::size_t k = 0; k < pX.values.size(); ++k)
      err = std::max(err, std::abs(pX.values[k] - a.values[k]));
    step.proj_err = err;
    step.ok = step.min_eig > 0.0 && step.proj_err <= eps;
    chk.all_ok = chk.all_ok && step.ok;
    chk.steps.push_back(step);
  }
  return chk;
}

}  // namespace minface
