#include "diraclab/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <random>
#include <vector>

namespace diraclab {

void hermitian_eig(const Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  evecs = a;
  evals.resize(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   reinterpret_cast<lapack_complex_double*>(evecs.data()), n,
                                   evals.data());
  if (info != 0)
    throw ConvergenceFailure("zheevd failed with info = " + std::to_string(info));
}

namespace {
Eigen::VectorXcd random_start(long dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (long i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
  v.normalize();
  return v;
}
}  // namespace

double lanczos_extremal(const ApplyFn& apply, long dim, int iters, uint64_t seed) {
  iters = static_cast<int>(std::min<long>(iters, dim));
  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(iters + 1);
  basis.push_back(random_start(dim, seed));

  std::vector<double> alpha, beta;  // tridiagonal entries
  Eigen::VectorXcd w(dim);
  for (int j = 0; j < iters; ++j) {
    apply(basis[j], w);
    cplx a = basis[j].dot(w);
    alpha.push_back(std::real(a));
    w -= a * basis[j];
    if (j > 0) w -= cplx(beta[j - 1]) * basis[j - 1];
    // full reorthogonalization keeps the extremal value clean
    for (const auto& q : basis) w -= q.dot(w) * q;
    double b = w.norm();
    if (b < 1e-14) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  const int m = static_cast<int>(alpha.size());
  if (m == 0) return 0.0;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1)));
}

double spectral_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, long dim, int iters,
                     uint64_t seed) {
  Eigen::VectorXcd tmp(dim);
  auto normal_op = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    apply(v, tmp);
    apply_adjoint(tmp, out);
  };
  double s2 = lanczos_extremal(normal_op, dim, iters, seed);
  return std::sqrt(std::max(s2, 0.0));
}

double spectral_norm(const Eigen::MatrixXcd& a, int iters, uint64_t seed) {
  auto fwd = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out = a * v; };
  auto adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out = a.adjoint() * v; };
  return spectral_norm(fwd, adj, a.rows(), iters, seed);
}

std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double icept = (sy - slope * sx) / n;
  return {slope, icept};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return line_fit(lx, ly).first;
}

}  // namespace diraclab
