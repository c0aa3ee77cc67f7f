#include "diraclab/operators.hpp"

#include <fftw3.h>

#include <cmath>

namespace diraclab {

namespace {
const cplx I(0.0, 1.0);

void check_rep(const SpinorField& psi, bool momentum) {
  if (psi.momentum_rep != momentum)
    throw NumericalFailure("grid operator applied in the wrong representation");
}

void apply_blocks(const std::vector<Mat4>& blocks, const Eigen::VectorXcd& in,
                  Eigen::VectorXcd& out) {
  const long n = static_cast<long>(blocks.size());
  out.resize(4 * n);
  for (long f = 0; f < n; ++f)
    out.segment<4>(4 * f) = blocks[static_cast<size_t>(f)] * in.segment<4>(4 * f);
}
}  // namespace

GridOperator GridOperator::multiplier(const QuantumGrid& g, std::vector<Mat4> blocks,
                                      bool hermitian) {
  GridOperator op;
  op.grid_ = g;
  op.kind_ = Kind::multiplier;
  op.hermitian_ = hermitian;
  op.blocks_ = std::move(blocks);
  return op;
}

GridOperator GridOperator::x_multiplication(const QuantumGrid& g, std::vector<Mat4> blocks,
                                            bool hermitian) {
  GridOperator op;
  op.grid_ = g;
  op.kind_ = Kind::x_mult;
  op.hermitian_ = hermitian;
  op.blocks_ = std::move(blocks);
  return op;
}

GridOperator GridOperator::dense(const QuantumGrid& g, Eigen::MatrixXcd k_matrix, bool hermitian) {
  GridOperator op;
  op.grid_ = g;
  op.kind_ = Kind::dense;
  op.hermitian_ = hermitian;
  op.dense_ = std::make_shared<Eigen::MatrixXcd>(std::move(k_matrix));
  return op;
}

SpinorField GridOperator::apply(const SpinorField& psi) const {
  const bool was_momentum = psi.momentum_rep;
  SpinorField work = psi;
  switch (kind_) {
    case Kind::multiplier: {
      work = work.to_momentum();
      SpinorField out = work;
      apply_blocks(blocks_, work.v, out.v);
      return was_momentum ? out : out.to_position();
    }
    case Kind::x_mult: {
      work = work.to_position();
      SpinorField out = work;
      apply_blocks(blocks_, work.v, out.v);
      return was_momentum ? out.to_momentum() : out;
    }
    case Kind::dense: {
      work = work.to_momentum();
      SpinorField out = work;
      out.v = (*dense_) * work.v;
      return was_momentum ? out : out.to_position();
    }
  }
  throw NumericalFailure("unreachable operator kind");
}

std::shared_ptr<const Eigen::MatrixXcd> GridOperator::dense_matrix() const {
  if (dense_) return dense_;
  const long g = grid_.points();
  auto m = std::make_shared<Eigen::MatrixXcd>(Eigen::MatrixXcd::Zero(4 * g, 4 * g));
  if (kind_ == Kind::multiplier) {
    for (long f = 0; f < g; ++f) m->block<4, 4>(4 * f, 4 * f) = blocks_[static_cast<size_t>(f)];
  } else if (kind_ == Kind::x_mult) {
    // cyclic convolution blocks from the spatial Fourier coefficients
    std::vector<Mat4> coeff(static_cast<size_t>(g), Mat4::Zero());
    // DFT over the grid: coeff_nu = (1/G) sum_n blocks[n] e^{-2 pi i nu.n / N}
    // done naively per entry via FFT on scalars
    Eigen::VectorXcd buf(g);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        for (long f = 0; f < g; ++f) buf[f] = blocks_[static_cast<size_t>(f)](r, c);
        // reuse the spinor FFT by embedding: cheap direct DFT per axis instead
        // (grids are small when dense work is requested)
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g);
        for (long nu = 0; nu < g; ++nu) {
          auto nuidx = grid_.unflatten(nu);
          cplx acc = 0.0;
          for (long n = 0; n < g; ++n) {
            auto nidx = grid_.unflatten(n);
            double phase = 0.0;
            for (int a = 0; a < grid_.dim; ++a)
              phase += 2.0 * M_PI * double(nuidx[a]) * double(nidx[a]) / grid_.npts[a];
            acc += buf[n] * std::exp(cplx(0.0, -phase));
          }
          out[nu] = acc / static_cast<double>(g);
        }
        for (long nu = 0; nu < g; ++nu) coeff[static_cast<size_t>(nu)](r, c) = out[nu];
      }
    for (long kp = 0; kp < g; ++kp) {
      auto kpi = grid_.unflatten(kp);
      for (long k = 0; k < g; ++k) {
        auto ki = grid_.unflatten(k);
        std::array<int, 3> d{0, 0, 0};
        for (int a = 0; a < grid_.dim; ++a)
          d[a] = ((kpi[a] - ki[a]) % grid_.npts[a] + grid_.npts[a]) % grid_.npts[a];
        m->block<4, 4>(4 * kp, 4 * k) = coeff[static_cast<size_t>(grid_.flatten(d))];
      }
    }
  }
  dense_ = m;
  return dense_;
}

cplx GridOperator::expectation(const SpinorField& psi) const {
  SpinorField ap = apply(psi);
  return psi.inner(ap);
}

namespace {
// structure detection: constant in p over the lattice window, or constant in x
bool symbol_is_x_only(const MatrixSymbol& sym, const QuantumGrid& g) {
  JetContext ctx{g.dim, 0};
  for (double fx : {0.13, 0.57, 0.86}) {
    Vec3 x = g.transverse_x;
    for (int a = 0; a < g.dim; ++a) x[a] = fx * g.box[a];
    Vec3 p0 = g.transverse_p, p1 = g.transverse_p;
    for (int a = 0; a < g.dim; ++a) {
      p0[a] = -0.71 * g.p_max(a);
      p1[a] = 0.37 * g.p_max(a);
    }
    if ((sym.jets(x, p0, ctx).value() - sym.jets(x, p1, ctx).value()).norm() > 1e-13) return false;
  }
  return true;
}

bool symbol_is_p_only(const MatrixSymbol& sym, const QuantumGrid& g) {
  JetContext ctx{g.dim, 0};
  for (double fp : {-0.43, 0.11, 0.77}) {
    Vec3 p = g.transverse_p;
    for (int a = 0; a < g.dim; ++a) p[a] = fp * g.p_max(a);
    Vec3 x0 = g.transverse_x, x1 = g.transverse_x;
    for (int a = 0; a < g.dim; ++a) {
      x0[a] = 0.23 * g.box[a];
      x1[a] = 0.69 * g.box[a];
    }
    if ((sym.jets(x0, p, ctx).value() - sym.jets(x1, p, ctx).value()).norm() > 1e-13) return false;
  }
  return true;
}
}  // namespace

std::vector<Eigen::MatrixXcd> quantize_dense_batch(const QuantumGrid& g, int ncoeff,
                                                   const BatchSymbolEval& eval, bool hermitian) {
  g.validate();
  if (g.dim > 2) throw ConfigError("dense quantization is limited to one and two dimensions");
  const long gp = g.points();
  const int dim = g.dim;

  // half-step momentum lattice per axis: q_j = (pi hbar / L) j, j in [-N, N-2]
  std::array<long, 2> qn{1, 1};
  for (int a = 0; a < dim; ++a) qn[a] = 2L * g.npts[a] - 1;
  const long qtot = qn[0] * qn[1];

  std::array<int, 2> keep{0, 0};
  for (int a = 0; a < dim; ++a) keep[a] = g.npts[a] / 2;
  std::array<long, 2> kn{1, 1};
  for (int a = 0; a < dim; ++a) kn[a] = 2L * keep[a] + 1;
  const long ktot = kn[0] * kn[1];

  std::vector<std::vector<Mat4>> table(
      static_cast<size_t>(ncoeff),
      std::vector<Mat4>(static_cast<size_t>(qtot) * ktot, Mat4::Zero()));
  std::vector<std::vector<Mat4>> nodes(static_cast<size_t>(ncoeff),
                                       std::vector<Mat4>(static_cast<size_t>(gp)));
  std::vector<Mat4> point(static_cast<size_t>(ncoeff));
  Eigen::VectorXcd buf(gp), fbuf(gp);

  std::vector<int> nvec(g.npts.begin(), g.npts.begin() + dim);
  fftw_plan plan = fftw_plan_many_dft(dim, nvec.data(), 1,
                                      reinterpret_cast<fftw_complex*>(buf.data()), nullptr, 1, 1,
                                      reinterpret_cast<fftw_complex*>(fbuf.data()), nullptr, 1, 1,
                                      FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);

  for (long qf = 0; qf < qtot; ++qf) {
    Vec3 q = g.transverse_p;
    long rest = qf;
    for (int a = dim - 1; a >= 0; --a) {
      long j = rest % qn[a];
      rest /= qn[a];
      q[a] = (M_PI * g.hbar / g.box[a]) * static_cast<double>(j - g.npts[a]);
    }
    for (long n = 0; n < gp; ++n) {
      Vec3 x = g.position(g.unflatten(n));
      eval(x, q, point);
      for (int cidx = 0; cidx < ncoeff; ++cidx)
        nodes[static_cast<size_t>(cidx)][static_cast<size_t>(n)] = point[static_cast<size_t>(cidx)];
    }
    for (int cidx = 0; cidx < ncoeff; ++cidx) {
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          for (long n = 0; n < gp; ++n)
            buf[n] = nodes[static_cast<size_t>(cidx)][static_cast<size_t>(n)](r, c);
          fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                           reinterpret_cast<fftw_complex*>(fbuf.data()));
          for (long kf = 0; kf < ktot; ++kf) {
            std::array<int, 3> nu{0, 0, 0};
            long krest = kf;
            for (int a = dim - 1; a >= 0; --a) {
              nu[a] = static_cast<int>(krest % kn[a]) - keep[a];
              krest /= kn[a];
            }
            std::array<int, 3> src{0, 0, 0};
            for (int a = 0; a < dim; ++a) src[a] = (nu[a] + g.npts[a]) % g.npts[a];
            table[static_cast<size_t>(cidx)][static_cast<size_t>(qf) * ktot + kf](r, c) =
                fbuf[g.flatten(src)] / static_cast<double>(gp);
          }
        }
    }
  }
  fftw_destroy_plan(plan);

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<size_t>(ncoeff));
  for (int cidx = 0; cidx < ncoeff; ++cidx) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4 * gp, 4 * gp);
    for (long kp = 0; kp < gp; ++kp) {
      auto kpi = g.unflatten(kp);
      for (long k = 0; k < gp; ++k) {
        auto ki = g.unflatten(k);
        bool in_band = true;
        long qf = 0, kf = 0;
        for (int a = 0; a < dim && in_band; ++a) {
          int kpa = g.k_of(a, kpi[a]);
          int ka = g.k_of(a, ki[a]);
          int nu = kpa - ka;
          if (std::abs(nu) > keep[a]) {
            in_band = false;
            break;
          }
          qf = qf * qn[a] + (kpa + ka + g.npts[a]);
          kf = kf * kn[a] + (nu + keep[a]);
        }
        if (!in_band) continue;
        m.block<4, 4>(4 * kp, 4 * k) =
            table[static_cast<size_t>(cidx)][static_cast<size_t>(qf) * ktot + kf];
      }
    }
    if (hermitian) m = 0.5 * (m + m.adjoint()).eval();
    out.push_back(std::move(m));
  }
  return out;
}

GridOperator weyl_quantize(const MatrixSymbol& sym, const QuantumGrid& g) {
  g.validate();
  if (g.dim > 2) throw ConfigError("dense quantization is limited to one and two dimensions");
  const long gp = g.points();
  const int dim = g.dim;

  // structured symbols keep their exact representations
  if (symbol_is_p_only(sym, g)) {
    std::vector<Mat4> blocks(static_cast<size_t>(gp));
    JetContext ctx{dim, 0};
    for (long f = 0; f < gp; ++f)
      blocks[static_cast<size_t>(f)] =
          sym.jets(g.transverse_x, g.momentum_at(g.unflatten(f)), ctx).value();
    return GridOperator::multiplier(g, std::move(blocks), sym.hermitian());
  }
  if (symbol_is_x_only(sym, g)) {
    std::vector<Mat4> blocks(static_cast<size_t>(gp));
    JetContext ctx{dim, 0};
    for (long f = 0; f < gp; ++f)
      blocks[static_cast<size_t>(f)] =
          sym.jets(g.position(g.unflatten(f)), g.transverse_p, ctx).value();
    return GridOperator::x_multiplication(g, std::move(blocks), sym.hermitian());
  }

  auto eval = [&sym, dim](const Vec3& x, const Vec3& p, std::vector<Mat4>& out) {
    out[0] = sym.value(x, p, dim);
  };
  std::vector<Eigen::MatrixXcd> m = quantize_dense_batch(g, 1, eval, sym.hermitian());
  return GridOperator::dense(g, std::move(m[0]), sym.hermitian());
}

Eigen::MatrixXcd position_matrix(const QuantumGrid& g, int axis) {
  const long gp = g.points();
  std::vector<Mat4> blocks(static_cast<size_t>(gp));
  for (long f = 0; f < gp; ++f)
    blocks[static_cast<size_t>(f)] = g.position(g.unflatten(f))[axis] * Mat4::Identity();
  return *GridOperator::x_multiplication(g, std::move(blocks), true).dense_matrix();
}

Eigen::VectorXd bulk_mask(const QuantumGrid& g, int margin) {
  const long gp = g.points();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4 * gp);
  for (long f = 0; f < gp; ++f) {
    auto idx = g.unflatten(f);
    bool inside = true;
    for (int a = 0; a < g.dim; ++a)
      if (std::abs(g.k_of(a, idx[a])) > g.npts[a] / 2 - margin) inside = false;
    if (inside) w.segment<4>(4 * f).setOnes();
  }
  return w;
}

int default_bulk_margin(const QuantumGrid& g) {
  // a quarter of the modes per side keeps the probed block at |p| <= p_max/2
  // uniformly across an hbar sweep with fixed p_max
  int n = g.npts[0];
  for (int a = 1; a < g.dim; ++a) n = std::min(n, g.npts[a]);
  return std::max(4, n / 4);
}

double masked_operator_norm(const Eigen::MatrixXcd& op, const Eigen::VectorXd& mask,
                            uint64_t seed) {
  auto fwd = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    out = mask.asDiagonal() * (op * (mask.asDiagonal() * v));
  };
  auto adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    out = mask.asDiagonal() * (op.adjoint() * (mask.asDiagonal() * v));
  };
  return spectral_norm(fwd, adj, op.rows(), 90, seed);
}

DiracGridHamiltonian DiracGridHamiltonian::build(const DiracSymbolSet& set, const QuantumGrid& g) {
  g.validate();
  g.require_nyquist(set.cst);
  if (!set.preset.grid_compatible)
    throw PresetNotPeriodic("preset '" + set.preset.name + "' has no periodic gauge; grid use is "
                            "restricted to periodic presets");
  for (int a = 0; a < g.dim; ++a) {
    for (double frac : {0.237, 0.741}) {
      Vec3 x = 0.31 * set.preset.box;
      x[a] = frac * g.box[a];
      Vec3 xs = x;
      xs[a] += g.box[a];
      double dphi = std::abs(set.preset.phi_at(x) - set.preset.phi_at(xs));
      double dA = (set.preset.A_at(x) - set.preset.A_at(xs)).norm();
      if (dphi + dA > 1e-10)
        throw ConfigError("preset fields are not periodic over the grid box");
    }
  }

  DiracGridHamiltonian h;
  h.grid = g;
  h.set = set;
  const double mc2 = set.cst.mc2();
  const double c = set.cst.c, e = set.cst.e;
  const long gp = g.points();

  h.T.resize(static_cast<size_t>(gp));
  for (long f = 0; f < gp; ++f) {
    Vec3 p = g.momentum_at(g.unflatten(f));
    Mat4 t = mc2 * dirac_beta();
    for (int a = 0; a < 3; ++a) t += c * p[a] * dirac_alpha(a);
    h.T[static_cast<size_t>(f)] = t;
  }

  h.V.resize(static_cast<size_t>(gp));
  double vmax = 0.0;
  for (long f = 0; f < gp; ++f) {
    Vec3 x = g.position(g.unflatten(f));
    Mat4 v = (e * set.preset.phi_at(x)) * Mat4::Identity();
    Vec3 A = set.preset.A_at(x);
    for (int a = 0; a < 3; ++a) v -= e * A[a] * dirac_alpha(a);
    h.V[static_cast<size_t>(f)] = v;
    vmax = std::max(vmax, v.norm());
  }
  h.free_preset = vmax < 1e-14;
  return h;
}

SpinorField DiracGridHamiltonian::apply(const SpinorField& psi) const {
  SpinorField pk = psi.to_momentum();
  SpinorField tpart = pk;
  apply_blocks(T, pk.v, tpart.v);
  SpinorField tpos = tpart.to_position();

  SpinorField pos = psi.to_position();
  SpinorField out = pos;
  apply_blocks(V, pos.v, out.v);
  out.v += tpos.v;
  return psi.momentum_rep ? out.to_momentum() : out;
}

GridOperator DiracGridHamiltonian::as_operator() const { return GridOperator::dense(grid, dense(), true); }

Eigen::MatrixXcd DiracGridHamiltonian::dense() const {
  Eigen::MatrixXcd m = *GridOperator::x_multiplication(grid, V, true).dense_matrix();
  for (long f = 0; f < grid.points(); ++f) m.block<4, 4>(4 * f, 4 * f) += T[static_cast<size_t>(f)];
  return m;
}

namespace {
// closed-form exponential exp(-i s M) for M with M^2 = r^2 I
Mat4 clifford_exp(const Mat4& m, double r, double s) {
  if (r < 1e-300) return Mat4::Identity();
  return std::cos(r * s) * Mat4::Identity() - I * (std::sin(r * s) / r) * m;
}
}  // namespace

SpinorField DiracGridHamiltonian::propagate_exact_free(const SpinorField& psi, double t) const {
  if (!free_preset) throw NotFreePreset("exact momentum-space propagation needs the free preset");
  SpinorField pk = psi.to_momentum();
  const double mc2 = set.cst.mc2(), c = set.cst.c;
  for (long f = 0; f < grid.points(); ++f) {
    Vec3 p = grid.momentum_at(grid.unflatten(f));
    double eps = std::sqrt((c * p).squaredNorm() + mc2 * mc2);
    pk.v.segment<4>(4 * f) =
        clifford_exp(T[static_cast<size_t>(f)], eps, t / grid.hbar) * pk.v.segment<4>(4 * f);
  }
  return psi.momentum_rep ? pk : pk.to_position();
}

SpinorField DiracGridHamiltonian::strang_step(const SpinorField& psi, double dt, int nsteps) const {
  const double mc2 = set.cst.mc2(), c = set.cst.c, e = set.cst.e;
  const long gp = grid.points();

  std::vector<Mat4> half_T(static_cast<size_t>(gp));
  for (long f = 0; f < gp; ++f) {
    Vec3 p = grid.momentum_at(grid.unflatten(f));
    double eps = std::sqrt((c * p).squaredNorm() + mc2 * mc2);
    half_T[static_cast<size_t>(f)] = clifford_exp(T[static_cast<size_t>(f)], eps, 0.5 * dt / grid.hbar);
  }
  std::vector<Mat4> full_V(static_cast<size_t>(gp));
  for (long f = 0; f < gp; ++f) {
    Vec3 x = grid.position(grid.unflatten(f));
    double phi = set.preset.phi_at(x);
    Vec3 A = set.preset.A_at(x);
    Mat4 aA = Mat4::Zero();
    for (int a = 0; a < 3; ++a) aA -= e * A[a] * dirac_alpha(a);
    full_V[static_cast<size_t>(f)] =
        std::exp(-I * (e * phi * dt / grid.hbar)) * clifford_exp(aA, e * A.norm(), dt / grid.hbar);
  }

  SpinorField cur = psi.to_momentum();
  SpinorField tmp = cur;
  for (int s = 0; s < nsteps; ++s) {
    apply_blocks(half_T, cur.v, tmp.v);
    cur.v.swap(tmp.v);
    cur = cur.to_position();
    apply_blocks(full_V, cur.v, tmp.v);
    cur.v.swap(tmp.v);
    cur = cur.to_momentum();
    apply_blocks(half_T, cur.v, tmp.v);
    cur.v.swap(tmp.v);
  }
  return psi.momentum_rep ? cur : cur.to_position();
}

SpinorField DiracGridHamiltonian::propagate_split(const SpinorField& psi, double t,
                                                  double tol) const {
  if (free_preset) return propagate_exact_free(psi, t);
  // supremum of the Hamiltonian scale sets the first step count
  double hnorm = 0.0;
  for (const auto& m : T) hnorm = std::max(hnorm, m.operatorNorm());
  int nsteps = std::max<int>(8, static_cast<int>(std::ceil(std::abs(t) * hnorm / grid.hbar * 0.2)));
  SpinorField coarse = strang_step(psi, t / nsteps, nsteps);
  for (int it = 0; it < 14; ++it) {
    SpinorField fine = strang_step(psi, 0.5 * t / nsteps, 2 * nsteps);
    double diff = std::sqrt(psi.grid.cell_volume()) * (fine.v - coarse.v).norm();
    if (diff < tol) return fine;
    coarse = fine;
    nsteps *= 2;
  }
  throw ToleranceNotMet("split propagation did not converge to the requested tolerance");
}

SpinorField DiracGridHamiltonian::propagate_krylov(const SpinorField& psi, double t,
                                                   double tol) const {
  const long dim = grid.hilbert_dim();
  const int m_max = 36;
  SpinorField cur = psi.to_momentum();
  double remaining = t;
  double sub = t;
  int guard = 0;
  const double sign = (t >= 0) ? 1.0 : -1.0;

  while (std::abs(remaining) > 1e-14 * std::abs(t) && guard++ < 4096) {
    double tau = sign * std::min(std::abs(sub), std::abs(remaining));
    // Lanczos basis from the current state
    std::vector<Eigen::VectorXcd> q;
    q.push_back(cur.v.normalized());
    std::vector<double> alpha, beta;
    bool happy = false;
    for (int j = 0; j < m_max; ++j) {
      SpinorField qa(grid, true);
      qa.v = q[static_cast<size_t>(j)];
      Eigen::VectorXcd w = apply(qa).v;
      double a = std::real(q[static_cast<size_t>(j)].dot(w));
      alpha.push_back(a);
      w -= a * q[static_cast<size_t>(j)];
      if (j > 0) w -= beta[static_cast<size_t>(j) - 1] * q[static_cast<size_t>(j) - 1];
      for (const auto& qq : q) w -= qq.dot(w) * qq;
      double b = w.norm();
      if (b < 1e-13) {
        happy = true;
        break;
      }
      beta.push_back(b);
      q.push_back(w / b);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tmat(i, i) = alpha[static_cast<size_t>(i)];
      if (i + 1 < m) tmat(i, i + 1) = tmat(i + 1, i) = beta[static_cast<size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
    Eigen::VectorXcd phase(m);
    for (int i = 0; i < m; ++i)
      phase[i] = std::exp(-I * (es.eigenvalues()(i) * tau / grid.hbar));
    Eigen::VectorXcd small =
        es.eigenvectors().cast<cplx>() *
        (phase.array() * es.eigenvectors().row(0).transpose().array().cast<cplx>()).matrix();
    // a-posteriori error estimate from the last component
    double est = happy ? 0.0
                       : std::abs(beta.empty() ? 0.0 : beta.back()) * std::abs(small[m - 1]) *
                             std::abs(tau) / grid.hbar;
    if (!happy && est > tol * 0.5 && std::abs(tau) > 1e-12) {
      sub = tau * 0.5;
      continue;
    }
    double nrm = cur.v.norm();
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(dim);
    for (int i = 0; i < m; ++i) next += small[i] * q[static_cast<size_t>(i)];
    cur.v = nrm * next;
    remaining -= tau;
    sub = tau * 1.4;
  }
  if (std::abs(remaining) > 1e-12 * std::abs(t))
    throw ToleranceNotMet("krylov propagation stalled");
  return psi.momentum_rep ? cur : cur.to_position();
}

SpinorField propagate(const DiracGridHamiltonian& h, const SpinorField& psi, double t,
                      PropagationMethod method, double tol) {
  switch (method) {
    case PropagationMethod::exact_free:
      return h.propagate_exact_free(psi, t);
    case PropagationMethod::split:
      return h.propagate_split(psi, t, tol);
    case PropagationMethod::krylov:
      return h.propagate_krylov(psi, t, tol);
  }
  throw NumericalFailure("unknown propagation method");
}

SpectralDecomposition SpectralDecomposition::compute(const DiracGridHamiltonian& h) {
  return compute(h.dense(), h.grid);
}

SpectralDecomposition SpectralDecomposition::compute(const Eigen::MatrixXcd& m,
                                                     const QuantumGrid& g) {
  SpectralDecomposition d;
  d.grid = g;
  hermitian_eig(m, d.evals, d.evecs);
  return d;
}

SpinorField SpectralDecomposition::evolve(const SpinorField& psi, double t, double hbar) const {
  SpinorField pk = psi.to_momentum();
  Eigen::VectorXcd c = evecs.adjoint() * pk.v;
  for (long i = 0; i < evals.size(); ++i) c[i] *= std::exp(-I * (evals[i] * t / hbar));
  pk.v = evecs * c;
  return psi.momentum_rep ? pk : pk.to_position();
}

Eigen::MatrixXcd SpectralDecomposition::projector_above(double E) const {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(evecs.rows(), evecs.cols());
  for (long i = 0; i < evals.size(); ++i)
    if (evals[i] > E) p += evecs.col(i) * evecs.col(i).adjoint();
  return p;
}

Eigen::MatrixXcd SpectralDecomposition::evolve_matrix(const Eigen::MatrixXcd& b, double t,
                                                      double hbar) const {
  Eigen::VectorXcd ph(evals.size());
  for (long i = 0; i < evals.size(); ++i) ph[i] = std::exp(I * (evals[i] * t / hbar));
  // U(t)* B U(t) with U = V e^{-i E t/hbar} V*
  Eigen::MatrixXcd core = evecs.adjoint() * b * evecs;
  core = ph.asDiagonal() * core * ph.conjugate().asDiagonal();
  return evecs * core * evecs.adjoint();
}

GridOperator free_branch_projector(const DiracGridHamiltonian& h, Branch b) {
  if (!h.free_preset) throw NotFreePreset("exact branch projectors require the free preset");
  const double s = branch_sign(b);
  std::vector<Mat4> blocks(h.T.size());
  const double mc2 = h.set.cst.mc2(), c = h.set.cst.c;
  for (long f = 0; f < h.grid.points(); ++f) {
    Vec3 p = h.grid.momentum_at(h.grid.unflatten(f));
    double eps = std::sqrt((c * p).squaredNorm() + mc2 * mc2);
    blocks[static_cast<size_t>(f)] =
        0.5 * (Mat4::Identity() + (s / eps) * h.T[static_cast<size_t>(f)]);
  }
  return GridOperator::multiplier(h.grid, std::move(blocks), true);
}

Eigen::MatrixXcd projected_position_matrix(const DiracGridHamiltonian& h, Branch b, int axis) {
  auto p = free_branch_projector(h, b).dense_matrix();
  Eigen::MatrixXcd x = position_matrix(h.grid, axis);
  return (*p) * x * (*p);
}

namespace {
Vec3 position_expectation(const SpinorField& psi) {
  SpinorField pos = psi.to_position();
  const QuantumGrid& g = pos.grid;
  Vec3 acc = Vec3::Zero();
  double mass = 0.0;
  for (long f = 0; f < g.points(); ++f) {
    double m = pos.v.segment<4>(4 * f).squaredNorm();
    Vec3 x = g.position(g.unflatten(f));
    for (int a = 0; a < g.dim; ++a) acc[a] += m * x[a];
    mass += m;
  }
  return acc / mass;
}
}  // namespace

ZitterTrace zitterbewegung_trace(const DiracGridHamiltonian& h, const SpinorField& psi0,
                                 const std::vector<double>& times) {
  if (!h.free_preset) throw NotFreePreset("zitterbewegung trace runs on the free preset");
  const QuantumGrid& g = h.grid;
  const double mc2 = h.set.cst.mc2(), c = h.set.cst.c;

  SpinorField pk = psi0.to_momentum();
  require_boundary_margin(psi0);

  ZitterTrace out;
  Vec3 x0 = position_expectation(psi0);

  // momentum-space coefficients of the drift and interference terms
  Vec3 drift = Vec3::Zero();
  const long gp = g.points();
  std::vector<double> eps(static_cast<size_t>(gp));
  for (long f = 0; f < gp; ++f) {
    Vec3 p = g.momentum_at(g.unflatten(f));
    eps[static_cast<size_t>(f)] = std::sqrt((c * p).squaredNorm() + mc2 * mc2);
    const Mat4& T = h.T[static_cast<size_t>(f)];
    Eigen::Vector4cd amp = pk.v.segment<4>(4 * f);
    for (int a = 0; a < g.dim; ++a) {
      // c^2 p H^-1 = c^2 p H / eps^2
      cplx val = amp.dot((c * c * p[a] / (eps[static_cast<size_t>(f)] * eps[static_cast<size_t>(f)])) *
                         (T * amp));
      drift[a] += std::real(val) * g.cell_volume();
    }
  }

  for (double t : times) {
    SpinorField pt = h.propagate_exact_free(pk, t);
    Vec3 direct = position_expectation(pt);

    Vec3 osc = Vec3::Zero();
    for (long f = 0; f < gp; ++f) {
      const Mat4& T = h.T[static_cast<size_t>(f)];
      const double e1 = eps[static_cast<size_t>(f)];
      Eigen::Vector4cd amp = pk.v.segment<4>(4 * f);
      Mat4 Hinv = T / (e1 * e1);
      Mat4 osc_phase = (std::cos(2 * e1 * t / g.hbar) - 1.0) * Mat4::Identity() +
                       I * std::sin(2 * e1 * t / g.hbar) * (T / e1);
      for (int a = 0; a < g.dim; ++a) {
        Vec3 p = g.momentum_at(g.unflatten(f));
        Mat4 F = c * dirac_alpha(a) - c * c * p[a] * Hinv;
        Mat4 term = (g.hbar / (2.0 * I)) * Hinv * osc_phase * F;
        osc[a] += std::real(amp.dot(term * amp)) * g.cell_volume();
      }
    }
    Vec3 closed = x0 + t * drift + osc;
    out.t.push_back(t);
    out.direct.push_back(direct);
    out.closed_form.push_back(closed);
  }
  double scale = 0.0;
  for (const Vec3& d : out.direct) scale = std::max(scale, d.norm());
  for (size_t i = 0; i < out.t.size(); ++i) {
    double err = (out.direct[i] - out.closed_form[i]).norm();
    out.max_abs_err = std::max(out.max_abs_err, err);
  }
  out.max_rel_err = out.max_abs_err / std::max(scale, 1e-30);
  return out;
}

double interference_identity_residual(const DiracGridHamiltonian& h, const SpinorField& psi,
                                      int axis) {
  const QuantumGrid& g = h.grid;
  GridOperator pp = free_branch_projector(h, Branch::plus);
  GridOperator pm = free_branch_projector(h, Branch::minus);

  // build P+ x P- psi + P- x P+ psi
  SpinorField pmpsi = pm.apply(psi);
  SpinorField pppsi = pp.apply(psi);
  SpinorField xa = pmpsi.to_position();
  SpinorField xb = pppsi.to_position();
  for (long f = 0; f < g.points(); ++f) {
    double xval = g.position(g.unflatten(f))[axis];
    xa.v.segment<4>(4 * f) *= xval;
    xb.v.segment<4>(4 * f) *= xval;
  }
  SpinorField lhs(g);
  lhs.v = pp.apply(xa).to_position().v + pm.apply(xb).to_position().v;

  // rhs = (hbar / 2i) H^-1 F psi in momentum space; the sign follows from
  // x = i hbar d/dp on the momentum side: the off-diagonal block of the
  // position operator is -(i hbar/2) Lambda (d Lambda/dp) with Lambda = H/eps
  SpinorField pk = psi.to_momentum();
  SpinorField rhs(g, true);
  const double mc2 = h.set.cst.mc2(), c = h.set.cst.c;
  for (long f = 0; f < g.points(); ++f) {
    Vec3 p = g.momentum_at(g.unflatten(f));
    double eps = std::sqrt((c * p).squaredNorm() + mc2 * mc2);
    const Mat4& T = h.T[static_cast<size_t>(f)];
    Mat4 Hinv = T / (eps * eps);
    Mat4 F = c * dirac_alpha(axis) - c * c * p[axis] * Hinv;
    rhs.v.segment<4>(4 * f) = (-I * g.hbar / 2.0) * (Hinv * (F * pk.v.segment<4>(4 * f)));
  }
  SpinorField rhs_pos = rhs.to_position();
  return std::sqrt(g.cell_volume()) * (lhs.v - rhs_pos.v).norm();
}

std::vector<double> heisenberg_series(const DiracGridHamiltonian& h,
                                      const std::function<SpinorField(const SpinorField&)>& op,
                                      const SpinorField& psi0, const std::vector<double>& times) {
  std::vector<double> out;
  SpinorField pk = psi0.to_momentum();
  for (double t : times) {
    SpinorField pt = h.propagate_exact_free(pk, t);
    out.push_back(std::real(pt.inner(op(pt))));
  }
  return out;
}

}  // namespace diraclab
