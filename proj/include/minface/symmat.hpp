#pragma once

// Dense real symmetric matrices. Storage is a full Eigen matrix that is kept
// exactly symmetric by construction: every mutation writes both triangles, and
// validated imports mirror the lower triangle. Entries must be finite.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace minface {

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("SymMatrix: negative dimension");
    m_ = Eigen::MatrixXd::Zero(n, n);
  }

  static SymMatrix identity(int n) {
    SymMatrix s(n);
    s.m_.setIdentity();
    return s;
  }

  // Validates squareness, finiteness, and symmetry within sym_tol relative to
  // the largest entry, then mirrors the lower triangle so the stored matrix is
  // exactly symmetric.
  static SymMatrix from_dense(const Eigen::MatrixXd& A, double sym_tol = 1e-12) {
    if (A.rows() != A.cols())
      throw std::invalid_argument("SymMatrix: matrix is not square");
    const int n = int(A.rows());
    if (n > 0 && !A.allFinite())
      throw std::invalid_argument("SymMatrix: non-finite entry");
    const double scale = n > 0 ? std::max(1.0, A.cwiseAbs().maxCoeff()) : 1.0;
    if (n > 0) {
      const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
      if (asym > sym_tol * scale)
        throw std::invalid_argument("SymMatrix: matrix is not symmetric within tolerance (max asymmetry " +
                                    std::to_string(asym) + ")");
    }
    SymMatrix s(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        s.m_(i, j) = A(i, j);
        s.m_(j, i) = A(i, j);
      }
    return s;
  }

  // Averages A with its transpose; for internal expressions symmetric up to
  // roundoff. IEEE addition commutes, so the result is bitwise symmetric.
  static SymMatrix symmetrized(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
      throw std::invalid_argument("SymMatrix: matrix is not square");
    SymMatrix s(int(A.rows()));
    s.m_ = 0.5 * (A + A.transpose());
    if (s.n_ > 0 && !s.m_.allFinite())
      throw std::invalid_argument("SymMatrix: non-finite entry");
    return s;
  }

  int size() const { return n_; }

  double operator()(int i, int j) const {
    check_index(i, j);
    return m_(i, j);
  }

  void set(int i, int j, double v) {
    check_index(i, j);
    if (!std::isfinite(v)) throw std::invalid_argument("SymMatrix::set: non-finite value");
    m_(i, j) = v;
    m_(j, i) = v;
  }

  void add(int i, int j, double v) { set(i, j, m_(i, j) + v); }

  const Eigen::MatrixXd& dense() const { return m_; }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double c) {
    m_ *= c;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

  // Frobenius pairing; for symmetric arguments this is trace(A B).
  double trace_inner(const SymMatrix& o) const {
    check_same(o);
    return m_.cwiseProduct(o.m_).sum();
  }

  double frob_norm() const { return m_.norm(); }
  double max_abs() const { return n_ > 0 ? m_.cwiseAbs().maxCoeff() : 0.0; }

  Eigen::VectorXd eigenvalues() const {
    if (n_ == 0) return Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("SymMatrix: eigenvalue computation failed");
    return es.eigenvalues();
  }

  double min_eigenvalue() const { return n_ > 0 ? eigenvalues().minCoeff() : 0.0; }

 private:
  void check_index(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::invalid_argument("SymMatrix: index out of range");
  }
  void check_same(const SymMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
  }

  int n_ = 0;
  Eigen::MatrixXd m_;
};

}  // namespace minface
