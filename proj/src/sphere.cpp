#include "diraclab/sphere.hpp"

#include <cmath>

namespace diraclab {

Mat2 spin_quantizer(const Vec3& n) {
  Mat2 m = 0.5 * Mat2::Identity();
  const double s = 0.5 * std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) m += s * n[k] * pauli(k);
  return m;
}

SphereFunction matrix_to_sphere(const Mat2& B) {
  if ((B - B.adjoint()).norm() > 1e-12 * (1.0 + B.norm()))
    throw NumericalFailure("matrix_to_sphere: input is not hermitian");
  SphereFunction f;
  f.a0 = 0.5 * std::real(B.trace());
  for (int k = 0; k < 3; ++k) f.a[k] = 0.5 * std::sqrt(3.0) * std::real((B * pauli(k)).trace());
  return f;
}

Mat2 sphere_to_matrix(const SphereFunction& b) {
  Mat2 m = b.a0 * Mat2::Identity();
  for (int k = 0; k < 3; ++k) m += (b.a[k] / std::sqrt(3.0)) * pauli(k);
  return m;
}

const SphereQuadrature& octahedral_6() {
  static const SphereQuadrature q = [] {
    SphereQuadrature r;
    for (int a = 0; a < 3; ++a)
      for (double s : {1.0, -1.0}) {
        r.nodes.push_back(s * Vec3::Unit(a));
        r.weights.push_back(1.0 / 6.0);
      }
    r.exact_degree = 3;
    return r;
  }();
  return q;
}

const SphereQuadrature& lebedev_14() {
  static const SphereQuadrature q = [] {
    SphereQuadrature r;
    for (int a = 0; a < 3; ++a)
      for (double s : {1.0, -1.0}) {
        r.nodes.push_back(s * Vec3::Unit(a));
        r.weights.push_back(1.0 / 15.0);
      }
    const double c = 1.0 / std::sqrt(3.0);
    for (double sx : {1.0, -1.0})
      for (double sy : {1.0, -1.0})
        for (double sz : {1.0, -1.0}) {
          r.nodes.push_back(Vec3(sx * c, sy * c, sz * c));
          r.weights.push_back(3.0 / 40.0);
        }
    r.exact_degree = 5;
    return r;
  }();
  return q;
}

Mat2 sphere_to_matrix(const SphereFunction& b, const SphereQuadrature& q) {
  if (q.exact_degree < 2)
    throw NumericalFailure("sphere_to_matrix: quadrature not exact for the integrand degree");
  Mat2 m = Mat2::Zero();
  for (size_t i = 0; i < q.nodes.size(); ++i)
    m += q.weights[i] * b(q.nodes[i]) * spin_quantizer(q.nodes[i]);
  return 2.0 * m;
}

double covariance_defect(const Mat2& g, const Vec3& n) {
  Mat2 lhs = g * spin_quantizer(n) * g.adjoint();
  Mat2 rhs = spin_quantizer(su2_to_so3(g) * n);
  return (lhs - rhs).norm();
}

}  // namespace diraclab
