#include "diraclab/algebra.hpp"

#include <Eigen/Eigenvalues>

namespace diraclab {

namespace {
const cplx I(0.0, 1.0);
}

const Mat2& pauli(int k) {
  static const Mat2 s1 = (Mat2() << 0, 1, 1, 0).finished();
  static const Mat2 s2 = (Mat2() << 0, -I, I, 0).finished();
  static const Mat2 s3 = (Mat2() << 1, 0, 0, -1).finished();
  static const Mat2* s[3] = {&s1, &s2, &s3};
  return *s[k];
}

namespace {
Mat4 make_alpha(int k) {
  Mat4 a = Mat4::Zero();
  a.block<2, 2>(0, 2) = pauli(k);
  a.block<2, 2>(2, 0) = pauli(k);
  return a;
}
Mat4 make_sigma(int k) {
  Mat4 a = Mat4::Zero();
  a.block<2, 2>(0, 0) = pauli(k);
  a.block<2, 2>(2, 2) = pauli(k);
  return a;
}
}  // namespace

const Mat4& dirac_alpha(int k) {
  static const Mat4 a1 = make_alpha(0), a2 = make_alpha(1), a3 = make_alpha(2);
  static const Mat4* a[3] = {&a1, &a2, &a3};
  return *a[k];
}

const Mat4& dirac_beta() {
  static const Mat4 b = (Eigen::Vector4cd(1, 1, -1, -1)).asDiagonal().toDenseMatrix();
  return b;
}

const Mat4& dirac_sigma(int k) {
  static const Mat4 s1 = make_sigma(0), s2 = make_sigma(1), s3 = make_sigma(2);
  static const Mat4* s[3] = {&s1, &s2, &s3};
  return *s[k];
}

Eigen::Matrix3d su2_to_so3(const Mat2& g) {
  Eigen::Matrix3d r;
  const Mat2 gs = g.adjoint();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (pauli(i) * g * pauli(j) * gs).trace().real();
  return r;
}

namespace {
template <typename M>
double polar_restore_impl(M& m) {
  Eigen::SelfAdjointEigenSolver<M> es(m.adjoint() * m);
  M inv_sqrt = M::Zero();
  for (int i = 0; i < m.rows(); ++i)
    inv_sqrt += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
                std::sqrt(es.eigenvalues()(i));
  M u = m * inv_sqrt;
  double drift = (u - m).norm();
  m = u;
  return drift;
}
}  // namespace

double polar_restore(Mat2& m) { return polar_restore_impl(m); }
double polar_restore(Mat4& m) { return polar_restore_impl(m); }

double su2_restore(Mat2& m) {
  double drift = polar_restore_impl(m);
  cplx det = m.determinant();
  cplx s = std::sqrt(det);
  if (std::real(s) < 0) s = -s;
  m /= s;
  return drift + std::abs(det - cplx(1.0));
}

}  // namespace diraclab
