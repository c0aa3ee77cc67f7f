#pragma once

#include "diraclab/operators.hpp"
#include "diraclab/sphere.hpp"

namespace diraclab {

// Matrix-valued Wigner transform on a one-dimensional periodic grid,
// tabulated on the (x node, lattice momentum) array. Entries are 4x4.
struct WignerData {
  QuantumGrid grid;
  // row-major [x index][natural momentum index], each a 4x4 matrix
  std::vector<Mat4> w;

  const Mat4& at(long n, long k) const { return w[static_cast<size_t>(n * grid.npts[0] + k)]; }
  // integral of tr W over dx dp / (2 pi hbar); equals |psi|^2 in the continuum
  double total_trace() const;
};

WignerData wigner_transform(const SpinorField& psi);

// scalar sphere lift w_pm(x, p, n) = tr( Delta(n) V_pm^* W V_pm )
double wigner_sphere_lift(const WignerData& w, const DiracSymbolSet& set, Branch b, long n_idx,
                          long k_idx, const Vec3& n);

}  // namespace diraclab
