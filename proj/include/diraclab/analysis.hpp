#pragma once

#include <vector>

#include "diraclab/linalg.hpp"

namespace diraclab {

// residuals after removing the least-squares affine trend a + b t
std::vector<double> affine_residuals(const std::vector<double>& t, const std::vector<double>& y);
double max_affine_residual(const std::vector<double>& t, const std::vector<double>& y);

// Angular frequency of a sampled cosine after affine detrending, from the
// least-squares solution of r_{n+1} + r_{n-1} = 2 cos(w dt) r_n. Exact for a
// single tone; returns the centroid for narrow bands.
double dominant_frequency_recurrence(const std::vector<double>& y, double dt);

// Angular frequency from the discrete spectrum peak with parabolic
// interpolation on log magnitudes.
double dominant_frequency_fft(const std::vector<double>& y, double dt);

}  // namespace diraclab
