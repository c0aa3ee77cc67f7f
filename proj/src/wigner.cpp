#include "diraclab/wigner.hpp"

#include <fftw3.h>

#include <cmath>

namespace diraclab {

double WignerData::total_trace() const {
  // dx dp / (2 pi hbar) with dp = 2 pi hbar / L becomes dx / L per node pair
  double acc = 0.0;
  for (const Mat4& m : w) acc += std::real(m.trace());
  return acc * grid.dx(0) / grid.box[0];
}

WignerData wigner_transform(const SpinorField& psi) {
  const QuantumGrid& g = psi.grid;
  if (g.dim != 1)
    throw ConfigError("the dense Wigner array is tabulated on one-dimensional grids");
  const int N = g.npts[0];

  // band-limited interpolation of the field onto the half-step grid
  SpinorField pk = psi.to_momentum();
  Eigen::VectorXcd half(4L * 2 * N);
  {
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(4L * 2 * N);
    for (int i = 0; i < N; ++i) {
      int k = g.k_of(0, i);
      int j = (k + 2 * N) % (2 * N);
      padded.segment<4>(4 * j) = pk.v.segment<4>(4 * i);
    }
    QuantumGrid g2 = g;
    g2.npts[0] = 2 * N;
    SpinorField tmp(g2, true);
    tmp.v = padded;
    // unitary inverse transform on 2N points carries 1/sqrt(2N); the
    // interpolant needs 1/sqrt(N), hence the sqrt(2)
    half = std::sqrt(2.0) * tmp.to_position().v;
  }

  WignerData out;
  out.grid = g;
  out.w.assign(static_cast<size_t>(N) * N, Mat4::Zero());

  // correlate over even/odd offsets and transform offset -> momentum
  Eigen::VectorXcd corr(N), spec(N);
  fftw_plan plan = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(corr.data()),
                                    reinterpret_cast<fftw_complex*>(spec.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  const double dx = g.dx(0);
  for (int n = 0; n < N; ++n) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        for (int s = 0; s < N; ++s) {
          int sv = (s < N / 2) ? s : s - N;  // natural order offsets
          int jp = ((2 * n + sv) % (2 * N) + 2 * N) % (2 * N);
          int jm = ((2 * n - sv) % (2 * N) + 2 * N) % (2 * N);
          corr[s] = half[4 * jp + a] * std::conj(half[4 * jm + b]);
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(corr.data()),
                         reinterpret_cast<fftw_complex*>(spec.data()));
        for (int k = 0; k < N; ++k) out.w[static_cast<size_t>(n) * N + k](a, b) = dx * spec[k];
      }
  }
  fftw_destroy_plan(plan);
  return out;
}

double wigner_sphere_lift(const WignerData& w, const DiracSymbolSet& set, Branch b, long n_idx,
                          long k_idx, const Vec3& n) {
  const QuantumGrid& g = w.grid;
  std::array<int, 3> xi{static_cast<int>(n_idx), 0, 0};
  std::array<int, 3> ki{static_cast<int>(k_idx), 0, 0};
  Vec3 x = g.position(xi);
  Vec3 p = g.momentum_at(ki);
  Mat42 V = set.isometry(b, x, p);
  Mat2 blk = V.adjoint() * w.at(n_idx, k_idx) * V;
  return std::real((spin_quantizer(n) * blk).trace());
}

}  // namespace diraclab
