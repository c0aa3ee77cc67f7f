#pragma once

#include <array>
#include <vector>

#include "diraclab/dirac_model.hpp"

namespace diraclab {

// Periodic spatial grid for 1..3 active axes; inactive axes are frozen at
// fixed position and momentum values. Lattice momenta are 2 pi hbar k / L
// with integer k in [-N/2, N/2).
struct QuantumGrid {
  int dim = 1;
  std::array<int, 3> npts = {64, 1, 1};
  Vec3 box = Vec3::Constant(2.0 * M_PI);
  double hbar = 0.1;
  Vec3 transverse_p = Vec3::Zero();
  Vec3 transverse_x = Vec3::Zero();

  long points() const {
    long g = 1;
    for (int a = 0; a < dim; ++a) g *= npts[a];
    return g;
  }
  long hilbert_dim() const { return 4 * points(); }
  double dx(int axis) const { return box[axis] / npts[axis]; }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx(a);
    return v;
  }
  // signed lattice index from the natural FFT index
  int k_of(int axis, int i) const { return (i < npts[axis] / 2) ? i : i - npts[axis]; }
  double momentum(int axis, int k) const { return 2.0 * M_PI * hbar * k / box[axis]; }
  double p_max(int axis) const { return momentum(axis, npts[axis] / 2); }

  std::array<int, 3> unflatten(long f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % npts[a]);
      f /= npts[a];
    }
    return idx;
  }
  long flatten(const std::array<int, 3>& idx) const {
    long f = 0;
    for (int a = 0; a < dim; ++a) f = f * npts[a] + idx[a];
    return f;
  }
  Vec3 position(const std::array<int, 3>& idx) const {
    Vec3 x = transverse_x;
    for (int a = 0; a < dim; ++a) x[a] = idx[a] * dx(a);
    return x;
  }
  Vec3 momentum_at(const std::array<int, 3>& idx) const {
    Vec3 p = transverse_p;
    for (int a = 0; a < dim; ++a) p[a] = momentum(a, k_of(a, idx[a]));
    return p;
  }

  // momentum lattice must cover at least four Compton momenta
  void require_nyquist(const Constants& cst) const;
  void validate() const;  // powers of two, dim in range
};

QuantumGrid make_grid(int dim, int n, double box_length, double hbar,
                      const Vec3& transverse_p = Vec3::Zero());

// 4-component field on the grid, point-major storage; the same cell-volume
// weighted inner product is used in both representations (the transform is
// unitary).
struct SpinorField {
  QuantumGrid grid;
  bool momentum_rep = false;
  Eigen::VectorXcd v;

  SpinorField() = default;
  explicit SpinorField(const QuantumGrid& g, bool momentum = false)
      : grid(g), momentum_rep(momentum), v(Eigen::VectorXcd::Zero(g.hilbert_dim())) {}

  cplx inner(const SpinorField& o) const;
  double norm() const;
  SpinorField& normalize();

  SpinorField to_momentum() const;
  SpinorField to_position() const;
};

// fraction of |psi|^2 within `frac` of the box edges along active axes
double boundary_mass(const SpinorField& psi, double frac = 0.05);
void require_boundary_margin(const SpinorField& psi, double frac = 0.05, double tol = 1e-10);

// spin-up eigenvector of n.sigma
Eigen::Vector2cd spin_up_of(const Vec3& n);

// Gaussian packet of width sqrt(hbar/2) at (x0, p0) carrying the
// positive-branch spinor aligned with n0. width_scale widens the packet.
SpinorField coherent_state(const QuantumGrid& g, const DiracSymbolSet& set, const Vec3& x0,
                           const Vec3& p0, const Vec3& n0, double width_scale = 1.0);

// Gaussian envelope times a plane wave at lattice momentum q carrying an
// equal-weight mix of the two branch spinors; exhibits maximal interference.
SpinorField mixed_branch_packet(const QuantumGrid& g, const DiracSymbolSet& set, const Vec3& x0,
                                const Vec3& q, double width_scale = 1.0);

// deterministic random field localized at the box center (used where a
// "random state" must stay clear of the wrap-around)
SpinorField random_localized_state(const QuantumGrid& g, uint64_t seed);

}  // namespace diraclab
