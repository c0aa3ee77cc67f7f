#include "diraclab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <random>

namespace diraclab {

namespace {

struct PlanKey {
  std::array<int, 3> n;
  int rank;
  int sign;
  bool operator<(const PlanKey& o) const {
    return std::tie(n, rank, sign) < std::tie(o.n, o.rank, o.sign);
  }
};

fftw_plan get_plan(const QuantumGrid& g, int sign) {
  static std::mutex mu;
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  PlanKey key{g.npts, g.dim, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<int> n(g.npts.begin(), g.npts.begin() + g.dim);
  std::vector<cplx> scratch(static_cast<size_t>(g.hilbert_dim()));
  fftw_plan plan = fftw_plan_many_dft(
      g.dim, n.data(), 4, reinterpret_cast<fftw_complex*>(scratch.data()), nullptr, 4, 1,
      reinterpret_cast<fftw_complex*>(scratch.data()), nullptr, 4, 1, sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

void run_fft(const QuantumGrid& g, Eigen::VectorXcd& data, int sign) {
  fftw_plan plan = get_plan(g, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  data *= 1.0 / std::sqrt(static_cast<double>(g.points()));
}

}  // namespace

void QuantumGrid::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("grid dim must be 1..3");
  for (int a = 0; a < dim; ++a) {
    int n = npts[a];
    if (n < 4 || (n & (n - 1)) != 0)
      throw ConfigError("grid points per axis must be a power of two >= 4");
    if (!(box[a] > 0)) throw ConfigError("box lengths must be positive");
  }
  if (!(hbar > 0)) throw ConfigError("hbar must be positive");
}

void QuantumGrid::require_nyquist(const Constants& cst) const {
  for (int a = 0; a < dim; ++a) {
    double pmax = p_max(a);
    if (pmax < 4.0 * cst.m * cst.c)
      throw NyquistViolation("momentum lattice reaches " + std::to_string(pmax) +
                             " < 4 m c on axis " + std::to_string(a) +
                             "; refine the grid or enlarge hbar");
  }
}

QuantumGrid make_grid(int dim, int n, double box_length, double hbar, const Vec3& transverse_p) {
  QuantumGrid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) g.npts[a] = n;
  for (int a = dim; a < 3; ++a) g.npts[a] = 1;
  g.box = Vec3::Constant(box_length);
  g.hbar = hbar;
  g.transverse_p = transverse_p;
  g.validate();
  return g;
}

cplx SpinorField::inner(const SpinorField& o) const {
  if (momentum_rep != o.momentum_rep)
    throw NumericalFailure("inner product requires matching representations");
  return grid.cell_volume() * v.dot(o.v);
}

double SpinorField::norm() const { return std::sqrt(grid.cell_volume()) * v.norm(); }

SpinorField& SpinorField::normalize() {
  v /= norm();
  return *this;
}

SpinorField SpinorField::to_momentum() const {
  if (momentum_rep) return *this;
  SpinorField out = *this;
  run_fft(grid, out.v, FFTW_FORWARD);
  out.momentum_rep = true;
  return out;
}

SpinorField SpinorField::to_position() const {
  if (!momentum_rep) return *this;
  SpinorField out = *this;
  run_fft(grid, out.v, FFTW_BACKWARD);
  out.momentum_rep = false;
  return out;
}

double boundary_mass(const SpinorField& psi, double frac) {
  const SpinorField pos = psi.to_position();
  const QuantumGrid& g = pos.grid;
  double total = 0.0, edge = 0.0;
  for (long f = 0; f < g.points(); ++f) {
    auto idx = g.unflatten(f);
    bool near_edge = false;
    for (int a = 0; a < g.dim; ++a) {
      double x = idx[a] * g.dx(a);
      if (x < frac * g.box[a] || x > (1.0 - frac) * g.box[a]) near_edge = true;
    }
    double m = pos.v.segment<4>(4 * f).squaredNorm();
    total += m;
    if (near_edge) edge += m;
  }
  return edge / total;
}

void require_boundary_margin(const SpinorField& psi, double frac, double tol) {
  double m = boundary_mass(psi, frac);
  if (m > tol)
    throw BoundaryViolation("wavepacket mass " + std::to_string(m) +
                            " within the boundary margin; enlarge the box");
}

Eigen::Vector2cd spin_up_of(const Vec3& n) {
  double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
  double phi = std::atan2(n[1], n[0]);
  Eigen::Vector2cd chi;
  chi << std::cos(theta / 2.0), std::exp(cplx(0, phi)) * std::sin(theta / 2.0);
  return chi;
}

namespace {
double min_image(double d, double L) {
  d = std::fmod(d, L);
  if (d < -0.5 * L) d += L;
  if (d >= 0.5 * L) d -= L;
  return d;
}

SpinorField envelope_packet(const QuantumGrid& g, const Vec3& x0, const Vec3& p0,
                            const Eigen::Vector4cd& spinor, double width_scale) {
  SpinorField psi(g);
  const double hbar = g.hbar;
  for (long f = 0; f < g.points(); ++f) {
    auto idx = g.unflatten(f);
    Vec3 x = g.position(idx);
    double arg2 = 0.0;
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double dxa = min_image(x[a] - x0[a], g.box[a]);
      arg2 += dxa * dxa;
      phase += p0[a] * x[a];
    }
    cplx amp = std::exp(cplx(-arg2 / (2.0 * hbar * width_scale * width_scale), phase / hbar));
    psi.v.segment<4>(4 * f) = amp * spinor;
  }
  psi.normalize();
  return psi;
}
}  // namespace

SpinorField coherent_state(const QuantumGrid& g, const DiracSymbolSet& set, const Vec3& x0,
                           const Vec3& p0, const Vec3& n0, double width_scale) {
  Mat42 V = set.isometry(Branch::plus, x0, p0);
  Eigen::Vector4cd spinor = V * spin_up_of(n0);
  return envelope_packet(g, x0, p0, spinor, width_scale);
}

SpinorField mixed_branch_packet(const QuantumGrid& g, const DiracSymbolSet& set, const Vec3& x0,
                                const Vec3& q, double width_scale) {
  // spin along the first axis keeps the interference term of the position
  // expectation away from zero
  Eigen::Vector2cd chi = spin_up_of(Vec3::UnitX());
  Eigen::Vector4cd spinor = set.isometry(Branch::plus, x0, q) * chi +
                            set.isometry(Branch::minus, x0, q) * chi;
  spinor /= std::sqrt(2.0);
  return envelope_packet(g, x0, q, spinor, width_scale);
}

SpinorField random_localized_state(const QuantumGrid& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SpinorField acc(g);
  const int packets = 12;
  // widths stay clear of both the box edge and the momentum boundary
  double width = 1.5;
  for (int a = 0; a < g.dim; ++a)
    width = std::min(width, g.box[a] / 28.0 / std::sqrt(g.hbar / 2.0));
  for (int k = 0; k < packets; ++k) {
    Vec3 x0 = g.transverse_x, p0 = g.transverse_p;
    for (int a = 0; a < g.dim; ++a) {
      x0[a] = g.box[a] * (0.4 + 0.2 * u01(rng));
      p0[a] = 0.3 * g.p_max(a) * (2.0 * u01(rng) - 1.0);
    }
    Eigen::Vector4cd spinor;
    for (int s = 0; s < 4; ++s) spinor[s] = cplx(gauss(rng), gauss(rng));
    SpinorField pk = envelope_packet(g, x0, p0, spinor, width);
    acc.v += cplx(gauss(rng), gauss(rng)) * pk.v;
  }
  acc.normalize();
  return acc;
}

}  // namespace diraclab
