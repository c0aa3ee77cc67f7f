#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "diraclab/errors.hpp"
#include "diraclab/jet.hpp"

namespace diraclab {

// Dense hermitian eigendecomposition (LAPACK zheevd), ascending eigenvalues.
void hermitian_eig(const Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs);

using ApplyFn = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// Largest |eigenvalue| of a hermitian operator by Lanczos iteration with full
// reorthogonalization; deterministic for a fixed seed.
double lanczos_extremal(const ApplyFn& apply, long dim, int iters = 90, uint64_t seed = 12345);

// Spectral norm of a general operator via Lanczos on A*A.
double spectral_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, long dim,
                     int iters = 90, uint64_t seed = 12345);
double spectral_norm(const Eigen::MatrixXcd& a, int iters = 90, uint64_t seed = 12345);

// Least-squares line fit; returns (slope, intercept).
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y);

// Fitted slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace diraclab
