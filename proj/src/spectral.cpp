#include "diraclab/spectral.hpp"

#include "diraclab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace diraclab {

namespace {

// clusters of eigenvalues with gaps below the resolution are assigned to a
// window as a block, by their mean
constexpr double cluster_resolution = 1e-9;

struct ClusterRange {
  long begin = 0, end = 0;  // half open index range
  double mean = 0.0;
};

std::vector<ClusterRange> cluster_spectrum(const Eigen::VectorXd& evals) {
  std::vector<ClusterRange> out;
  long n = evals.size();
  long b = 0;
  while (b < n) {
    long e = b + 1;
    while (e < n && evals[e] - evals[e - 1] < cluster_resolution) ++e;
    double mean = 0.0;
    for (long i = b; i < e; ++i) mean += evals[i];
    out.push_back({b, e, mean / (e - b)});
    b = e;
  }
  return out;
}

}  // namespace

WindowSpectrum diagonalize(const DiracGridHamiltonian& h, const SpectrumWindow& win,
                           long dense_threshold) {
  WindowSpectrum out;
  const long dim = h.grid.hilbert_dim();
  if (dim > dense_threshold)
    throw ConfigError("grid dimension " + std::to_string(dim) +
                      " beyond the dense eigensolver threshold");

  Eigen::MatrixXcd hd = h.dense();
  out.full = SpectralDecomposition::compute(hd, h.grid);

  const double lo = win.lo(), hi = win.hi();
  for (const ClusterRange& c : cluster_spectrum(out.full.evals)) {
    bool straddles_lo = out.full.evals[c.begin] < lo && out.full.evals[c.end - 1] >= lo;
    bool straddles_hi = out.full.evals[c.begin] <= hi && out.full.evals[c.end - 1] > hi;
    if (straddles_lo || straddles_hi) out.ambiguity += c.end - c.begin;
    if (c.mean < lo || c.mean > hi) continue;
    for (long i = c.begin; i < c.end; ++i) {
      EigenPair p;
      p.energy = out.full.evals[i];
      p.vec = out.full.evecs.col(i);
      double resid = (hd * p.vec - p.energy * p.vec).norm();
      out.max_residual = std::max(out.max_residual, resid);
      out.pairs.push_back(std::move(p));
    }
  }
  if (out.pairs.empty()) throw WindowEmpty("no eigenvalues inside the requested window");
  double scale = std::max(std::abs(out.full.evals[0]), std::abs(out.full.evals[dim - 1]));
  if (out.max_residual > 1e-10 * scale)
    throw ConvergenceFailure("eigenpair residuals beyond tolerance");
  return out;
}

ProjectedEigenData project_eigens(const WindowSpectrum& spectrum, const GridProjector& p_plus,
                                  const GridProjector& p_minus, const Eigen::MatrixXcd& h_dense,
                                  double norm_floor) {
  ProjectedEigenData out;
  out.norm_floor = norm_floor;
  for (const EigenPair& ep : spectrum.pairs) {
    out.energy.push_back(ep.energy);
    Eigen::VectorXcd hpsi = h_dense * ep.vec;
    for (int side = 0; side < 2; ++side) {
      const Eigen::MatrixXcd& p = side == 0 ? p_plus.matrix : p_minus.matrix;
      Eigen::VectorXcd ppsi = p * ep.vec;
      double nrm = ppsi.norm();
      Eigen::VectorXcd hp = h_dense * ppsi;
      Eigen::VectorXcd ph = p * hpsi;
      double r = (hp - ph).norm() / std::max(nrm, 1e-300);
      double s = (hp - p * hp).norm() / std::max(nrm, 1e-300);
      bool present = nrm >= norm_floor;
      if (side == 0) {
        out.norm_plus.push_back(nrm);
        out.r_plus.push_back(r);
        out.s_plus.push_back(s);
        out.present_plus.push_back(present);
        out.phi_plus.push_back(present ? Eigen::VectorXcd(ppsi / nrm) : Eigen::VectorXcd());
      } else {
        out.norm_minus.push_back(nrm);
        out.r_minus.push_back(r);
        out.s_minus.push_back(s);
        out.present_minus.push_back(present);
        out.phi_minus.push_back(present ? Eigen::VectorXcd(ppsi / nrm) : Eigen::VectorXcd());
      }
    }
  }
  return out;
}

namespace {

// reduced-phase-space shell sampler over the active axes of the grid
struct ReducedSampler {
  const DiracSymbolSet& set;
  const QuantumGrid& g;
  double E;
  Branch branch;
  double window = 0.01;
  Vec3 p_lo, p_hi;
  double cell_volume = 1.0;  // product of box lengths and momentum spans
  bool feasible = false;

  ReducedSampler(const DiracSymbolSet& s, const QuantumGrid& grid, Branch b, double energy)
      : set(s), g(grid), E(energy), branch(b) {
    const double mc2 = set.cst.mc2(), c = set.cst.c, e = set.cst.e;
    p_lo = Vec3::Constant(1e300);
    p_hi = Vec3::Constant(-1e300);
    const int nx = 64;
    for (int i = 0; i < nx; ++i) {
      Vec3 x = g.transverse_x;
      for (int a = 0; a < g.dim; ++a) x[a] = g.box[a] * ((i + 0.5) / nx);
      double kin = branch_sign(b) * (E - e * set.preset.phi_at(x));
      double rad2 = kin * kin - mc2 * mc2;
      if (kin < mc2 || rad2 < 0.0) continue;
      feasible = true;
      Vec3 A = set.preset.A_at(x);
      for (int a = 0; a < g.dim; ++a) {
        p_lo[a] = std::min(p_lo[a], (e * A[a] - std::sqrt(rad2)) / c - 0.25);
        p_hi[a] = std::max(p_hi[a], (e * A[a] + std::sqrt(rad2)) / c + 0.25);
      }
    }
    if (!feasible) return;
    cell_volume = 1.0;
    for (int a = 0; a < g.dim; ++a) cell_volume *= g.box[a] * (p_hi[a] - p_lo[a]);
  }

  // draw a point in the box; returns the co-area weight if on the shell
  bool draw(std::mt19937_64& rng, Vec3& x, Vec3& p, double& w) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    x = g.transverse_x;
    p = g.transverse_p;
    for (int a = 0; a < g.dim; ++a) {
      x[a] = g.box[a] * u01(rng);
      p[a] = p_lo[a] + (p_hi[a] - p_lo[a]) * u01(rng);
    }
    double h = std::real(set.h(branch).value(x, p));
    if (std::abs(h - E) > window) return false;
    Jet hj = set.h(branch).jet(seed_phase(x, p, JetContext{3, 1}));
    double grad2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      ExpoVec ex{}, ep{};
      ex[a] = 1;
      ep[3 + a] = 1;
      grad2 += std::norm(hj.partial(ex)) + std::norm(hj.partial(ep));
    }
    w = 1.0 / std::max(std::sqrt(grad2), 1e-12);
    return true;
  }
};

double shell_volume_mc(const DiracSymbolSet& set, const QuantumGrid& g, Branch b, double E,
                       long samples, uint64_t seed, double& se) {
  ReducedSampler s(set, g, b, E);
  se = 0.0;
  if (!s.feasible) return 0.0;
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    Vec3 x, p;
    double w = 0.0;
    double val = 0.0;
    if (s.draw(rng, x, p, w)) val = w / (2.0 * s.window);
    sum += val;
    sum2 += val * val;
  }
  double mean = sum / samples;
  double var = std::max(sum2 / samples - mean * mean, 0.0);
  se = s.cell_volume * std::sqrt(var / samples);
  return s.cell_volume * mean;
}

}  // namespace

ShellVolumes shell_volumes(const DiracSymbolSet& set, const QuantumGrid& g, double E,
                           long samples, uint64_t seed) {
  ShellVolumes v;
  v.vol_plus = shell_volume_mc(set, g, Branch::plus, E, samples, seed, v.se_plus);
  v.vol_minus = shell_volume_mc(set, g, Branch::minus, E, samples, seed ^ 0x9e3779b9ull, v.se_minus);
  return v;
}

double shell_volume_quadrature(const DiracSymbolSet& set, const QuantumGrid& g, Branch b,
                               double E, int nx) {
  if (g.dim != 1) throw ConfigError("the quadrature oracle covers one active axis");
  const double mc2 = set.cst.mc2(), c = set.cst.c, e = set.cst.e;
  double acc = 0.0;
  for (int i = 0; i < nx; ++i) {
    Vec3 x = g.transverse_x;
    x[0] = g.box[0] * ((i + 0.5) / nx);
    double kin = branch_sign(b) * (E - e * set.preset.phi_at(x));
    if (kin <= mc2) continue;
    double r2 = kin * kin - mc2 * mc2;
    // transverse kinetic momentum is frozen
    Vec3 A = set.preset.A_at(x);
    double perp2 = 0.0;
    for (int a = 1; a < 3; ++a) perp2 += std::pow(c * g.transverse_p[a] - e * A[a], 2);
    double par2 = r2 - perp2;
    if (par2 <= 0.0) continue;
    // two momentum roots, each contributing eps / (c^2 |p1 - eA1/c|·c) = eps/(c |pi1|)
    acc += 2.0 * kin / (c * std::sqrt(par2)) * (g.box[0] / nx);
  }
  return acc;
}

long compressed_count(const Eigen::MatrixXcd& h_dense, const GridProjector& p, double lo,
                      double hi) {
  // orthonormal basis of the range from the projector's spectral structure
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  hermitian_eig(p.matrix, evals, evecs);
  long rank = 0;
  for (long i = 0; i < evals.size(); ++i)
    if (evals[i] > 0.5) ++rank;
  Eigen::MatrixXcd basis = evecs.rightCols(rank);
  Eigen::MatrixXcd comp = basis.adjoint() * h_dense * basis;
  Eigen::VectorXd ce;
  Eigen::MatrixXcd cv;
  hermitian_eig(comp, ce, cv);
  long count = 0;
  for (long i = 0; i < ce.size(); ++i)
    if (ce[i] >= lo && ce[i] <= hi) ++count;
  return count;
}

WindowCensus window_census(const DiracSymbolSet& set, const QuantumGrid& g,
                           const WindowSpectrum& spectrum, const ProjectedEigenData& data,
                           const GridProjector& p_plus, const GridProjector& p_minus,
                           const Eigen::MatrixXcd& h_dense, double E, double omega, double delta,
                           long mc_samples, uint64_t seed) {
  WindowCensus c;
  c.E = E;
  c.omega = omega;
  c.hbar = g.hbar;
  c.delta = delta;
  c.count = static_cast<long>(spectrum.pairs.size());
  c.ambiguity = spectrum.ambiguity;

  for (size_t i = 0; i < data.energy.size(); ++i) {
    c.szego_plus += data.norm_plus[i] * data.norm_plus[i];
    c.szego_minus += data.norm_minus[i] * data.norm_minus[i];
    if (data.norm_plus[i] * data.norm_plus[i] >= delta) ++c.n_delta_plus;
    if (data.norm_minus[i] * data.norm_minus[i] >= delta) ++c.n_delta_minus;
  }

  double lo = E - g.hbar * omega, hi = E + g.hbar * omega;
  c.count_plus = compressed_count(h_dense, p_plus, lo, hi);
  c.count_minus = compressed_count(h_dense, p_minus, lo, hi);

  c.volumes = shell_volumes(set, g, E, mc_samples, seed);
  // two spin states per phase-space cell of size (2 pi hbar)^d
  double cell = std::pow(2.0 * M_PI * g.hbar, g.dim);
  c.predicted_plus = 2.0 * (2.0 * g.hbar * omega) * c.volumes.vol_plus / cell;
  c.predicted_minus = 2.0 * (2.0 * g.hbar * omega) * c.volumes.vol_minus / cell;
  c.predicted_count = c.predicted_plus + c.predicted_minus;

  double tot = c.volumes.vol_plus + c.volumes.vol_minus;
  if (tot > 0.0) {
    c.fraction_bound_plus = c.volumes.vol_plus / tot - delta;
    c.fraction_plus = static_cast<double>(c.n_delta_plus) / std::max<long>(c.count, 1);
  }
  return c;
}

McAverage microcanonical_average(const DiracSymbolSet& set, const QuantumGrid& g, Branch b,
                                 double E, const SphereObservable& obs, long samples,
                                 uint64_t seed) {
  ReducedSampler s(set, g, b, E);
  if (!s.feasible) throw EmptyShell("no phase-space shell at this energy");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double sw = 0.0, swb = 0.0;
  std::vector<double> ws, bs;
  long accepted = 0;
  long draws = 0;
  const long max_draws = samples * 1000;
  while (accepted < samples && draws < max_draws) {
    ++draws;
    Vec3 x, p;
    double w = 0.0;
    if (!s.draw(rng, x, p, w)) continue;
    Vec3 n(gauss(rng), gauss(rng), gauss(rng));
    if (n.norm() < 1e-12) continue;
    n.normalize();
    double val = obs(x, p, n);
    ws.push_back(w);
    bs.push_back(val);
    sw += w;
    swb += w * val;
    ++accepted;
  }
  if (accepted == 0) throw EmptyShell("shell sampler accepted no points");
  McAverage m;
  m.accepted = accepted;
  m.mean = swb / sw;
  double v = 0.0;
  for (long i = 0; i < accepted; ++i)
    v += ws[static_cast<size_t>(i)] * ws[static_cast<size_t>(i)] *
         std::pow(bs[static_cast<size_t>(i)] - m.mean, 2);
  m.se = std::sqrt(v) / sw;
  return m;
}

double sphere_symbol_value(const DiracSymbolSet& set, Branch b, const MatrixSymbol& obs,
                           const Vec3& x, const Vec3& p, const Vec3& n) {
  Mat42 V = set.isometry(b, x, p);
  Mat2 blk = V.adjoint() * obs.value(x, p) * V;
  return std::real((spin_quantizer(n) * blk).trace());
}

QeDiagnostic qe_diagnostic(const DiracSymbolSet& set, const QuantumGrid& g,
                           const WindowSpectrum& spectrum, const ProjectedEigenData& data,
                           const GridProjector& p_plus, const GridProjector& p_minus,
                           const MatrixSymbol& observable, Branch branch, double E, double delta,
                           long mc_samples, uint64_t seed) {
  QeDiagnostic out;
  GridOperator bop = weyl_quantize(observable, g);
  auto bdense = bop.dense_matrix();

  const auto& norms = branch == Branch::plus ? data.norm_plus : data.norm_minus;
  const auto& phis = branch == Branch::plus ? data.phi_plus : data.phi_minus;

  for (size_t i = 0; i < data.energy.size(); ++i) {
    if (norms[i] * norms[i] < delta) continue;
    out.energy.push_back(data.energy[i]);
    cplx v = phis[i].dot((*bdense) * phis[i]);
    out.expectation.push_back(std::real(v));
  }
  if (out.expectation.empty()) throw EmptyRetainedSet("no states above the norm threshold");

  McAverage me = microcanonical_average(
      set, g, branch, E,
      [&](const Vec3& x, const Vec3& p, const Vec3& n) {
        return sphere_symbol_value(set, branch, observable, x, p, n);
      },
      mc_samples, seed);
  out.m_e = me.mean;
  out.m_e_se = me.se;

  long within = 0;
  double dev = 0.0;
  for (double e : out.expectation) {
    dev += std::abs(e - out.m_e);
    if (std::abs(e - out.m_e) <= out.eps_fraction) ++within;
  }
  out.mean_deviation = dev / out.expectation.size();
  out.fraction_within = static_cast<double>(within) / out.expectation.size();

  // single-shell variant: when the other branch has no classical shell,
  // eigenspinors themselves carry the statement and the other block vanishes
  ShellVolumes vols = shell_volumes(set, g, E, std::min<long>(mc_samples, 20000), seed ^ 0x1234u);
  double other_vol = branch == Branch::plus ? vols.vol_minus : vols.vol_plus;
  if (other_vol == 0.0) {
    out.single_shell = true;
    const Eigen::MatrixXcd& pother =
        branch == Branch::plus ? p_minus.matrix : p_plus.matrix;
    double acc = 0.0;
    for (const EigenPair& ep : spectrum.pairs) {
      Eigen::VectorXcd pv = pother * ep.vec;
      acc += std::real(pv.dot((*bdense) * pv));
    }
    out.other_branch_mean = acc / spectrum.pairs.size();
  }
  return out;
}

}  // namespace diraclab
