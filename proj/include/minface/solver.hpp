#pragma once

// Desk-scale feasibility solving on a face. A completion problem restricted to
// a face with range basis U becomes an affine-conic system in the reduced
// variable Z:
//   find Z PSD (r x r)  with  <A_k, Z> = b_k,
//   full ambient (PSD data), entry (i,j):   A_k = U^T E_ij U (symmetrized unit),
//   centered ambient (EDM data), edge (i,j): A_k = U^T (e_i - e_j)(e_i - e_j)^T U,
// the latter because squared distances of X = U Z U^T are <(e_i-e_j)(e_i-e_j)^T, X>.
//
// ap_solve runs alternating projections between the affine set and the PSD
// cone with Dykstra's correction vectors, so from a fixed start it converges
// to the nearest feasible point when one exists. It cannot prove conic
// infeasibility; callers may supply dual multiplier candidates y, each checked
// as a Farkas certificate (sum_k y_k A_k PSD and <y, b> < 0 means no feasible
// point). The affine subsystem alone is checked exactly through the Gram
// pseudo-inverse: if b is outside the range of the constraint map, the
// residual component is itself a certificate with sum_k y_k A_k = 0.
//
// sample_max_rank is the sampling oracle: it solves from `trials` random PSD
// starts, reports the maximum numerical rank observed (including the rank of
// the averaged feasible point, a relative-interior proxy), and the average.
//
// edm_realize factors a squared-distance matrix into points via the centered
// Gram matrix.

#include <cstdint>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "matcore.hpp"
#include "symmat.hpp"
#include "version.hpp"

namespace minface {

struct SolverOptions {
  double tol = 1e-9;      // feasibility tolerance, relative to max(1, |b|_inf)
  int max_iter = 50000;
  std::uint64_t seed = kDefaultSeed;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& msg, Eigen::VectorXd certificate, double pairing)
      : std::runtime_error(msg), certificate_(std::move(certificate)), pairing_(pairing) {}
  const Eigen::VectorXd& certificate() const { return certificate_; }
  double pairing() const { return pairing_; }

 private:
  Eigen::VectorXd certificate_;
  double pairing_;
};

class UndeterminedError : public std::runtime_error {
 public:
  UndeterminedError(const std::string& msg, int iterations = 0,
                    double residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct AffineSystem {
  int r = 0;                        // side length of the reduced variable
  std::vector<Eigen::MatrixXd> A;   // symmetric r x r constraint matrices
  Eigen::VectorXd b;
  std::vector<Edge> edges;          // originating pattern edge per row
};

inline AffineSystem reduce_constraints(const PartialMatrix& a, const FaceRep& face) {
  const PatternGraph& g = a.pattern;
  if (face.n != g.n) throw std::invalid_argument("reduce_constraints: face dimension mismatch");
  const Cone cone = face.ambient == Ambient::Centered ? Cone::EDM : Cone::PSD;
  if (cone == Cone::EDM && !g.loop_free())
    throw std::invalid_argument("reduce_constraints: centered face requires a loop-free pattern");
  const Eigen::MatrixXd& U = face.basis;
  const int r = face.rank();
  AffineSystem sys;
  sys.r = r;
  sys.b = Eigen::VectorXd(long(g.edges.size()));
  sys.edges = g.edges;
  sys.A.reserve(g.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [i, j] = g.edges[k];
    Eigen::MatrixXd Ak;
    if (cone == Cone::PSD) {
      Eigen::VectorXd ui = U.row(i).transpose();
      if (i == j) {
        Ak = ui * ui.transpose();
      } else {
        Eigen::VectorXd uj = U.row(j).transpose();
        Ak = 0.5 * (ui * uj.transpose() + uj * ui.transpose());
      }
    } else {
      Eigen::VectorXd d = (U.row(i) - U.row(j)).transpose();
      Ak = d * d.transpose();
    }
    sys.A.push_back(SymMatrix::symmetrized(Ak).dense());
    sys.b(long(k)) = a.values[k];
  }
  return sys;
}

enum class SolveOutcome { Feasible, Infeasible, Undetermined };

struct SolveStatus {
  SolveOutcome outcome = SolveOutcome::Undetermined;
  Eigen::MatrixXd point;  // reduced coordinates; meaningful when feasible
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  std::optional<Eigen::VectorXd> certificate;  // Farkas multipliers when infeasible
  double pairing = 0.0;                        // <y, b> for the certificate
};

namespace detail {

inline Eigen::VectorXd apply_map(const AffineSystem& sys, const Eigen::MatrixXd& Z) {
  Eigen::VectorXd out(long(sys.A.size()));
  for (std::size_t k = 0; k < sys.A.size(); ++k)
    out(long(k)) = sys.A[k].cwiseProduct(Z).sum();
  return out;
}

inline Eigen::MatrixXd combine(const AffineSystem& sys, const Eigen::VectorXd& y) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sys.r, sys.r);
  for (std::size_t k = 0; k < sys.A.size(); ++k) S += y(long(k)) * sys.A[k];
  return S;
}

inline Eigen::MatrixXd psd_project(const Eigen::MatrixXd& W) {
  if (W.rows() == 0) return W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_project: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// Checks one Farkas candidate: sum_k y_k A_k PSD within tolerance and
// <y, b> < -tol * scale.
inline bool farkas_valid(const AffineSystem& sys, const Eigen::VectorXd& y, double tol,
                         double* pairing_out) {
  if (y.size() != long(sys.A.size())) return false;
  Eigen::MatrixXd S = combine(sys, y);
  if (S.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol * scale) return false;
  }
  double pairing = y.dot(sys.b);
  double bscale = sys.b.size() > 0 ? std::max(1.0, sys.b.cwiseAbs().maxCoeff()) : 1.0;
  if (pairing >= -tol * bscale) return false;
  if (pairing_out) *pairing_out = pairing;
  return true;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline SolveStatus ap_solve(const AffineSystem& sys, const SolverOptions& opt = {},
                            const std::vector<Eigen::VectorXd>& dual_candidates = {},
                            const std::optional<Eigen::MatrixXd>& start = std::nullopt) {
  const int r = sys.r;
  const long m = long(sys.A.size());
  SolveStatus st;
  // A valid certificate settles the question; check candidates first.
  for (const auto& y : dual_candidates) {
    double pairing = 0.0;
    if (detail::farkas_valid(sys, y, opt.tol, &pairing)) {
      st.outcome = SolveOutcome::Infeasible;
      st.certificate = y;
      st.pairing = pairing;
      return st;
    }
  }
  const double bscale = m > 0 ? std::max(1.0, sys.b.cwiseAbs().maxCoeff()) : 1.0;
  if (m == 0) {
    st.outcome = SolveOutcome::Feasible;
    st.point = start ? detail::psd_project(*start) : Eigen::MatrixXd::Zero(r, r);
    st.residual = 0.0;
    return st;
  }
  if (r == 0) {
    // The face is the zero matrix; feasible iff b vanishes.
    double berr = sys.b.cwiseAbs().maxCoeff();
    if (berr <= opt.tol * bscale) {
      st.outcome = SolveOutcome::Feasible;
      st.point = Eigen::MatrixXd(0, 0);
      st.residual = berr;
      return st;
    }
    long worst = 0;
    sys.b.cwiseAbs().maxCoeff(&worst);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    y(worst) = sys.b(worst) > 0 ? -1.0 : 1.0;
    st.outcome = SolveOutcome::Infeasible;
    st.certificate = y;
    st.pairing = y.dot(sys.b);
    return st;
  }

  // Gram matrix of the constraint map and its pseudo-inverse.
  Eigen::MatrixXd G(m, m);
  for (long k = 0; k < m; ++k)
    for (long l = k; l < m; ++l) {
      double v = sys.A[std::size_t(k)].cwiseProduct(sys.A[std::size_t(l)]).sum();
      G(k, l) = v;
      G(l, k) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esG(G);
  if (esG.info() != Eigen::Success)
    throw std::runtime_error("ap_solve: Gram eigendecomposition failed");
  const Eigen::VectorXd gev = esG.eigenvalues();
  const double gcut = 1e-12 * std::max(gev.size() ? gev.maxCoeff() : 0.0, 1.0);
  Eigen::VectorXd ginv = Eigen::VectorXd::Zero(m);
  for (long k = 0; k < m; ++k)
    if (gev(k) > gcut) ginv(k) = 1.0 / gev(k);
  auto pinv_apply = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    return esG.eigenvectors() * (ginv.asDiagonal() * (esG.eigenvectors().transpose() * rhs));
  };

  // Consistency of the affine subsystem: the component of b outside the range
  // of the constraint map is an exact Farkas certificate.
  {
    Eigen::VectorXd y0 = pinv_apply(sys.b);
    Eigen::VectorXd w = sys.b - G * y0;
    if (w.cwiseAbs().maxCoeff() > opt.tol * bscale) {
      Eigen::VectorXd y = -w / w.norm();
      st.outcome = SolveOutcome::Infeasible;
      st.certificate = y;
      st.pairing = y.dot(sys.b);
      return st;
    }
  }

  // Symmetrize without aliasing x in its own transpose.
  Eigen::MatrixXd x = start ? Eigen::MatrixXd(0.5 * (*start + start->transpose()))
                            : Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(r, r);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r, r);
  for (int it = 1; it <= opt.max_iter; ++it) {
    Eigen::MatrixXd w = x + p;
    Eigen::VectorXd y = pinv_apply(sys.b - detail::apply_map(sys, w));
    Eigen::MatrixXd xa = w + detail::combine(sys, y);
    p = w - xa;
    Eigen::MatrixXd v = xa + q;
    x = detail::psd_project(v);
    q = v - x;
    double res = (detail::apply_map(sys, x) - sys.b).cwiseAbs().maxCoeff();
    if (res <= opt.tol * bscale) {
      st.outcome = SolveOutcome::Feasible;
      st.point = x;
      st.iterations = it;
      st.residual = res;
      return st;
    }
    st.iterations = it;
    st.residual = res;
  }
  st.outcome = SolveOutcome::Undetermined;
  st.point = x;
  return st;
}

struct RankSample {
  int max_rank = 0;          // over trial points and the averaged point
  Eigen::MatrixXd avg_face;  // average of feasible reduced points
  SymMatrix avg_ambient;     // U avg_face U^T
  int feasible_trials = 0;
  int trials = 0;
  std::vector<int> ranks;    // per feasible trial
};

inline int rank_of_reduced(const Eigen::MatrixXd& Z, RankTolerance tol) {
  if (Z.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z, Eigen::EigenvaluesOnly);
  double cut = detail::rank_cutoff(es.eigenvalues(), tol);
  int r = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > cut) ++r;
  return r;
}

inline RankSample sample_max_rank(const PartialMatrix& a, const FaceRep& face,
                                  int trials = 20, RankTolerance rank_tol = {},
                                  const SolverOptions& opt = {}) {
  if (trials <= 0) throw std::invalid_argument("sample_max_rank: trials must be positive");
  AffineSystem sys = reduce_constraints(a, face);
  const int r = sys.r;
  const double s0 = sys.b.size() > 0 ? std::max(1.0, sys.b.cwiseAbs().maxCoeff()) : 1.0;
  RankSample out;
  out.trials = trials;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(r, r);
  int undetermined = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(detail::mix_seed(opt.seed, std::uint64_t(t)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd W(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) W(i, j) = gauss(rng);
    Eigen::MatrixXd Z0 = (W * W.transpose()) * (s0 / std::max(1, r));
    SolveStatus st = ap_solve(sys, opt, {}, Z0);
    if (st.outcome == SolveOutcome::Infeasible) {
      throw InfeasibleError("sample_max_rank: system on the face is infeasible (pairing " +
                                std::to_string(st.pairing) + ")",
                            st.certificate.value_or(Eigen::VectorXd()), st.pairing);
    }
    if (st.outcome == SolveOutcome::Undetermined) {
      ++undetermined;
      continue;
    }
    out.ranks.push_back(rank_of_reduced(st.point, rank_tol));
    sum += st.point;
    ++out.feasible_trials;
  }
  if (out.feasible_trials == 0)
    throw UndeterminedError("sample_max_rank: no feasible point found in " +
                                std::to_string(trials) + " trials",
                            opt.max_iter * trials, std::numeric_limits<double>::quiet_NaN());
  out.avg_face = sum / double(out.feasible_trials);
  out.avg_ambient = SymMatrix::symmetrized(face.basis * out.avg_face * face.basis.transpose());
  out.max_rank = rank_of_reduced(out.avg_face, rank_tol);
  for (int rk : out.ranks) out.max_rank = std::max(out.max_rank, rk);
  return out;
}

struct Realization {
  Eigen::MatrixXd points;  // n x dim, row per point
  int dim = 0;
  double max_err = 0.0;    // max |  |p_i - p_j|^2 - D_ij |
};

inline Realization edm_realize(const SymMatrix& D, RankTolerance tol = {}) {
  const int n = D.size();
  SymMatrix B = kappa_pinv(D, tol);  // rejects non-hollow input
  auto es = detail::eig_sym(B.dense());
  if (!detail::psd_within(es.values, tol.rel_tol))
    throw std::domain_error("edm_realize: matrix is not a squared-distance matrix within tolerance "
                            "(centered Gram min eigenvalue " +
                            std::to_string(es.values.size() ? es.values.minCoeff() : 0.0) + ")");
  double cut = detail::rank_cutoff(es.values, tol);
  std::vector<int> keep;
  for (int i = 0; i < es.values.size(); ++i)
    if (es.values(i) > cut) keep.push_back(i);
  Realization out;
  out.dim = int(keep.size());
  out.points = Eigen::MatrixXd(n, out.dim);
  for (int c = 0; c < out.dim; ++c)
    out.points.col(c) = es.vectors.col(keep[c]) * std::sqrt(es.values(keep[c]));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d2 = (out.points.row(i) - out.points.row(j)).squaredNorm();
      out.max_err = std::max(out.max_err, std::abs(d2 - D(i, j)));
    }
  return out;
}

}  // namespace minface
