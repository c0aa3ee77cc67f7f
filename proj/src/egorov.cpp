#include "diraclab/egorov.hpp"

#include "diraclab/analysis.hpp"

#include <cmath>
#include <random>

namespace diraclab {

namespace {
const cplx I(0.0, 1.0);

void check_block_diagonal(const DiracSymbolSet& set, const MatrixSymbol& b, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 12; ++t) {
    Vec3 x(u(rng), u(rng), u(rng)), p(u(rng), u(rng), u(rng));
    Mat4 b0 = b.value(x, p);
    Mat4 pp = set.Pi0_plus.value(x, p);
    Mat4 pm = set.Pi0_minus.value(x, p);
    if ((pm * b0 * pp).norm() > 1e-10 || (pp * b0 * pm).norm() > 1e-10)
      throw BlockDiagonalityViolated(
          "observable has off-diagonal blocks with respect to the eigenprojections");
  }
}
}  // namespace

double egorov_classical_value(const DiracSymbolSet& set, Branch branch,
                              const MatrixSymbol& observable, const Vec3& x0, const Vec3& p0,
                              const Vec3& n0, double t, double tol) {
  TransportState s = spin_transport_2x2(set, branch, PhasePoint{x0, p0}, t, tol);
  Mat42 Vt = set.isometry(branch, s.z.x, s.z.p);
  Mat2 M = Vt.adjoint() * observable.value(s.z.x, s.z.p) * Vt;
  SphereFunction b = matrix_to_sphere(M);

  // initial spin state as a sphere function, paired through the quadrature
  Mat2 rho0 = 0.5 * Mat2::Identity();
  for (int k = 0; k < 3; ++k) rho0 += 0.5 * n0[k] * pauli(k);
  Eigen::Matrix3d R = su2_to_so3(s.D);

  const SphereQuadrature& quad = lebedev_14();
  double acc = 0.0;
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    double w_rho = std::real((spin_quantizer(quad.nodes[i]) * rho0).trace());
    acc += quad.weights[i] * w_rho * b(R * quad.nodes[i]);
  }
  return 2.0 * acc;
}

EgorovResult egorov_compare(const EgorovExperiment& exp) {
  if (exp.require_block_diagonal) check_block_diagonal(exp.set, exp.observable, 777);

  EgorovResult out;
  out.hbars = exp.hbars;
  out.times = exp.times;

  for (double t : exp.times)
    out.c.push_back(egorov_classical_value(exp.set, exp.branch, exp.observable, exp.x0, exp.p0,
                                           exp.n0, t, exp.flow_tol));

  for (double hb : exp.hbars) {
    QuantumGrid g = exp.grids(hb);
    DiracGridHamiltonian h = DiracGridHamiltonian::build(exp.set, g);
    GridOperator bop = weyl_quantize(exp.observable, g);

    SpinorField psi = coherent_state(g, exp.set, exp.x0, exp.p0, exp.n0, exp.width_scale);
    std::vector<double> series;
    SpinorField cur = psi;
    double t_cur = 0.0;
    for (double t : exp.times) {
      if (t != t_cur) {
        cur = h.propagate_krylov(cur, t - t_cur, 1e-9);
        t_cur = t;
      }
      require_boundary_margin(cur, 0.05, 1e-6);
      cplx val = bop.expectation(cur);
      if (std::abs(std::imag(val)) > 1e-10)
        throw NumericalFailure("hermitian observable produced a complex expectation");
      series.push_back(std::real(val));
    }
    out.q.push_back(series);
  }

  ScalingReport r;
  r.claim = "egorov-error";
  r.columns = {"abs_err"};
  r.values.assign(1, {});
  r.hbar = exp.hbars;
  for (size_t i = 0; i < exp.hbars.size(); ++i) {
    out.err_t0.push_back(std::abs(out.q[i].front() - out.c.front()));
    r.values[0].push_back(std::abs(out.q[i].back() - out.c.back()));
  }
  r.slopes = {loglog_slope(r.hbar, r.values[0])};
  out.scaling = std::move(r);
  return out;
}

InvariantAlgebraResult invariant_algebra_probe(const DiracSymbolSet& set,
                                               const MatrixSymbol& observable, int order,
                                               double t, const std::vector<double>& hbars,
                                               const GridFactory& grids) {
  InvariantAlgebraResult out;
  out.order = order;
  out.hbars = hbars;

  for (double hb : hbars) {
    QuantumGrid g = grids(hb);
    DiracGridHamiltonian h = DiracGridHamiltonian::build(set, g);
    SpectralDecomposition spec = SpectralDecomposition::compute(h);

    GridProjector pp = quantize_and_riesz(set, correct_projector_symbol(set, Branch::plus, order, g.dim), g);
    GridProjector pm = quantize_and_riesz(set, correct_projector_symbol(set, Branch::minus, order, g.dim), g);
    Eigen::MatrixXcd b = *weyl_quantize(observable, g).dense_matrix();
    Eigen::MatrixXcd bd = pp.matrix * b * pp.matrix + pm.matrix * b * pm.matrix;

    Eigen::VectorXd mask = bulk_mask(g, default_bulk_margin(g));
    Eigen::VectorXcd phase(spec.evals.size());
    for (long i = 0; i < spec.evals.size(); ++i)
      phase[i] = std::exp(I * (spec.evals[i] * t / g.hbar));

    // P+ U* Bd U P- as a chain of dense applies
    auto evolve_fwd = [&](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd c = spec.evecs.adjoint() * v;
      c.array() *= phase.array().conjugate();
      return Eigen::VectorXcd(spec.evecs * c);
    };
    auto evolve_bwd = [&](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd c = spec.evecs.adjoint() * v;
      c.array() *= phase.array();
      return Eigen::VectorXcd(spec.evecs * c);
    };
    auto offdiag_apply = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
      Eigen::VectorXcd u = mask.asDiagonal() * v;
      u = pm.matrix * u;
      u = evolve_fwd(u);
      u = bd * u;
      u = evolve_bwd(u);
      u = pp.matrix * u;
      w = mask.asDiagonal() * u;
    };
    auto offdiag_adjoint = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
      Eigen::VectorXcd u = mask.asDiagonal() * v;
      u = pp.matrix * u;
      u = evolve_fwd(u);
      u = bd * u;
      u = evolve_bwd(u);
      u = pm.matrix * u;
      w = mask.asDiagonal() * u;
    };
    out.offdiag_evolved.push_back(
        spectral_norm(offdiag_apply, offdiag_adjoint, bd.rows(), 90, 4242));

    auto initial_apply = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
      w = mask.asDiagonal() * (pp.matrix * (bd * (pm.matrix * (mask.asDiagonal() * v))));
    };
    auto initial_adjoint = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) {
      w = mask.asDiagonal() * (pm.matrix * (bd * (pp.matrix * (mask.asDiagonal() * v))));
    };
    out.offdiag_initial.push_back(
        spectral_norm(initial_apply, initial_adjoint, bd.rows(), 90, 4243));
  }
  out.slope = loglog_slope(out.hbars, out.offdiag_evolved);
  return out;
}

BarePositionProbe bare_position_probe(const DiracSymbolSet& free_set, const QuantumGrid& g,
                                      double packet_momentum, int nsteps) {
  DiracGridHamiltonian h = DiracGridHamiltonian::build(free_set, g);
  if (!h.free_preset) throw NotFreePreset("the bare-position probe runs on the free preset");

  GridOperator pp = free_branch_projector(h, Branch::plus);
  GridOperator pm = free_branch_projector(h, Branch::minus);
  Eigen::MatrixXcd x = position_matrix(g, 0);
  Eigen::MatrixXcd off = (*pp.dense_matrix()) * x * (*pm.dense_matrix());

  const double eps = std::sqrt(packet_momentum * packet_momentum + std::pow(free_set.cst.mc2(), 2));
  const double period = M_PI * g.hbar / eps;

  SpinorField psi =
      mixed_branch_packet(g, free_set, Vec3(0.5 * g.box[0], 0, 0), Vec3(packet_momentum, 0, 0), 6.0);
  SpinorField pk = psi.to_momentum();

  BarePositionProbe out;
  out.expected_frequency = 2.0 * eps / g.hbar;
  double dt = 6.0 * period / nsteps;
  for (int i = 0; i <= nsteps; ++i) {
    double t = i * dt;
    SpinorField pt = h.propagate_exact_free(pk, t);
    cplx v = pt.v.dot(off * pt.v) * g.cell_volume();
    out.times.push_back(t);
    out.interference.push_back(2.0 * std::real(v));
  }
  out.peak_frequency = dominant_frequency_fft(out.interference, dt);

  // the off-diagonal norm is invariant under the free evolution; measure it
  // at the final time through U(t)* O U(t) with the per-momentum multiplier
  Eigen::VectorXd mask = bulk_mask(g, default_bulk_margin(g));
  out.norm_initial = masked_operator_norm(off, mask);
  const double t_end = out.times.back();
  Eigen::MatrixXcd evolved(off.rows(), off.cols());
  {
    std::vector<Mat4> u(static_cast<size_t>(g.points()));
    for (long f = 0; f < g.points(); ++f) {
      Vec3 p = g.momentum_at(g.unflatten(f));
      double e1 = std::sqrt((free_set.cst.c * p).squaredNorm() + std::pow(free_set.cst.mc2(), 2));
      const Mat4& T = h.T[static_cast<size_t>(f)];
      u[static_cast<size_t>(f)] = std::cos(e1 * t_end / g.hbar) * Mat4::Identity() -
                                  I * (std::sin(e1 * t_end / g.hbar) / e1) * T;
    }
    for (long r = 0; r < g.points(); ++r)
      for (long c = 0; c < g.points(); ++c)
        evolved.block<4, 4>(4 * r, 4 * c) = u[static_cast<size_t>(r)].adjoint() *
                                            off.block<4, 4>(4 * r, 4 * c) *
                                            u[static_cast<size_t>(c)];
  }
  out.norm_evolved = masked_operator_norm(evolved, mask);
  return out;
}

MatrixSymbol spin_block_observable(const DiracSymbolSet& set, int axis, bool both_branches) {
  MatrixSymbol pp = set.Pi0_plus;
  MatrixSymbol pm = set.Pi0_minus;
  return MatrixSymbol(
      [pp, pm, axis, both_branches](const PhaseJets& s) {
        JetMat4 sig = JetMat4::constant(*s.tab, dirac_sigma(axis));
        JetMat4 p = pp.jets(s);
        JetMat4 out = p * sig * p;
        if (both_branches) {
          JetMat4 q = pm.jets(s);
          out += q * sig * q;
        }
        return out;
      },
      std::min(pp.max_order(), pm.max_order()), true);
}

}  // namespace diraclab
