#pragma once

#include <vector>

#include "diraclab/algebra.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

// Spin-1/2 quantizer and the correspondence between hermitian 2x2 matrices
// and affine functions on the unit sphere.

// Delta(n) = (1 + sqrt(3) n.sigma)/2
Mat2 spin_quantizer(const Vec3& n);

// Affine sphere function a0 + a.n
struct SphereFunction {
  double a0 = 0.0;
  Vec3 a = Vec3::Zero();

  double operator()(const Vec3& n) const { return a0 + a.dot(n); }
};

// b(n) = tr(Delta(n) B); requires B hermitian.
SphereFunction matrix_to_sphere(const Mat2& B);

// B = 2 * integral of b(n) Delta(n) over the normalized sphere measure.
Mat2 sphere_to_matrix(const SphereFunction& b);

// Quadrature nodes and weights on S^2; weights sum to one.
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int exact_degree = 0;
};
const SphereQuadrature& octahedral_6();   // exact through degree 3
const SphereQuadrature& lebedev_14();     // exact through degree 5

// Numerical quadrature variant of the reconstruction (the closed form above
// is the quadrature evaluated with a rule exact for the integrand's degree).
Mat2 sphere_to_matrix(const SphereFunction& b, const SphereQuadrature& q);

// || g Delta(n) g* - Delta(R(g) n) ||
double covariance_defect(const Mat2& g, const Vec3& n);

}  // namespace diraclab
