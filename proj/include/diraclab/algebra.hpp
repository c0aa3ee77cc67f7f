#pragma once

#include <Eigen/Dense>

#include "diraclab/jet.hpp"

namespace diraclab {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat42 = Eigen::Matrix<cplx, 4, 2>;
using Mat24 = Eigen::Matrix<cplx, 2, 4>;

// Pauli matrices sigma_1..sigma_3
const Mat2& pauli(int k);
// Dirac alpha_k = offdiag(sigma_k, sigma_k), beta = diag(1,1,-1,-1)
const Mat4& dirac_alpha(int k);
const Mat4& dirac_beta();
// Sigma_k = diag(sigma_k, sigma_k)
const Mat4& dirac_sigma(int k);

// SU(2) -> SO(3) covering, R(g)_ij = tr(sigma_i g sigma_j g*) / 2
Eigen::Matrix3d su2_to_so3(const Mat2& g);

// Nearest unitary by polar decomposition; returns the projection distance.
double polar_restore(Mat2& m);
double polar_restore(Mat4& m);
// Additionally fixes det = 1 (phase branch closest to identity).
double su2_restore(Mat2& m);

// Matrices with Jet entries, fixed small shapes.
template <int R, int C>
class JetMatrix {
public:
  JetMatrix() = default;
  explicit JetMatrix(const JetTable& t) {
    for (auto& e : m_) e = Jet(t);
  }
  static JetMatrix identity(const JetTable& t) {
    static_assert(R == C);
    JetMatrix I(t);
    for (int i = 0; i < R; ++i) I(i, i) = Jet(t, 1.0);
    return I;
  }
  static JetMatrix constant(const JetTable& t, const Eigen::Matrix<cplx, R, C>& v) {
    JetMatrix a(t);
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) a(i, j) = Jet(t, v(i, j));
    return a;
  }

  Jet& operator()(int i, int j) { return m_[i * C + j]; }
  const Jet& operator()(int i, int j) const { return m_[i * C + j]; }
  const JetTable& table() const { return m_[0].table(); }
  bool valid() const { return m_[0].valid(); }

  JetMatrix& operator+=(const JetMatrix& o) {
    for (int i = 0; i < R * C; ++i) m_[i] += o.m_[i];
    return *this;
  }
  JetMatrix& operator-=(const JetMatrix& o) {
    for (int i = 0; i < R * C; ++i) m_[i] -= o.m_[i];
    return *this;
  }
  JetMatrix& operator*=(cplx s) {
    for (int i = 0; i < R * C; ++i) m_[i] *= s;
    return *this;
  }
  friend JetMatrix operator+(JetMatrix a, const JetMatrix& b) { a += b; return a; }
  friend JetMatrix operator-(JetMatrix a, const JetMatrix& b) { a -= b; return a; }
  friend JetMatrix operator*(JetMatrix a, cplx s) { a *= s; return a; }
  friend JetMatrix operator*(cplx s, JetMatrix a) { a *= s; return a; }
  friend JetMatrix operator*(const Jet& s, const JetMatrix& a) {
    JetMatrix r(a.table());
    for (int i = 0; i < R * C; ++i) r.m_[i] = s * a.m_[i];
    return r;
  }

  template <int K>
  friend JetMatrix<R, K> operator*(const JetMatrix<R, C>& a, const JetMatrix<C, K>& b) {
    JetMatrix<R, K> r(a.table());
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < K; ++j) {
        Jet acc = a(i, 0) * b(0, j);
        for (int k = 1; k < C; ++k) acc += a(i, k) * b(k, j);
        r(i, j) = std::move(acc);
      }
    return r;
  }

  JetMatrix<C, R> adjoint() const {
    JetMatrix<C, R> r(table());
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) r(j, i) = m_[i * C + j].conjugate();
    return r;
  }

  Jet trace() const {
    static_assert(R == C);
    Jet t = m_[0];
    for (int i = 1; i < R; ++i) t += m_[i * C + i];
    return t;
  }

  JetMatrix derivative(int var) const {
    JetMatrix r;
    for (int i = 0; i < R * C; ++i) r.m_[i] = m_[i].derivative(var);
    return r;
  }
  JetMatrix derivative(const ExpoVec& ax) const {
    JetMatrix r;
    for (int i = 0; i < R * C; ++i) r.m_[i] = m_[i].derivative(ax);
    return r;
  }

  Eigen::Matrix<cplx, R, C> value() const {
    Eigen::Matrix<cplx, R, C> v;
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) v(i, j) = m_[i * C + j].value();
    return v;
  }
  Eigen::Matrix<cplx, R, C> partial(const ExpoVec& ax) const {
    Eigen::Matrix<cplx, R, C> v;
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) v(i, j) = m_[i * C + j].partial(ax);
    return v;
  }

private:
  std::array<Jet, static_cast<size_t>(R) * C> m_;
};

using JetMat2 = JetMatrix<2, 2>;
using JetMat4 = JetMatrix<4, 4>;
using JetMat42 = JetMatrix<4, 2>;

}  // namespace diraclab
