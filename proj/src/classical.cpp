#include "diraclab/classical.hpp"

#include <cmath>
#include <random>

namespace diraclab {

namespace {

const cplx I(0.0, 1.0);

void pack_mat2(const Mat2& m, double* out) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      *out++ = std::real(m(i, j));
      *out++ = std::imag(m(i, j));
    }
}
Mat2 unpack_mat2(const double* in) {
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double re = *in++, im = *in++;
      m(i, j) = cplx(re, im);
    }
  return m;
}
void pack_mat4(const Mat4& m, double* out) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      *out++ = std::real(m(i, j));
      *out++ = std::imag(m(i, j));
    }
}
Mat4 unpack_mat4(const double* in) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double re = *in++, im = *in++;
      m(i, j) = cplx(re, im);
    }
  return m;
}

Mat2 pauli_dot(const Vec3& v) {
  Mat2 m = Mat2::Zero();
  for (int k = 0; k < 3; ++k) m += v[k] * pauli(k);
  return m;
}

struct TransportSpec {
  bool want_D = false;
  bool want_d = false;
  bool want_n = false;
};

TransportState integrate_transport(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                   const Vec3& n0, double t, double tol, TransportSpec spec) {
  int dim = 6;
  int off_D = -1, off_d = -1, off_n = -1;
  if (spec.want_D) { off_D = dim; dim += 8; }
  if (spec.want_d) { off_d = dim; dim += 32; }
  if (spec.want_n) { off_n = dim; dim += 3; }

  Eigen::VectorXd y(dim);
  y.segment<3>(0) = z0.x;
  y.segment<3>(3) = z0.p;
  if (spec.want_D) pack_mat2(Mat2::Identity(), y.data() + off_D);
  if (spec.want_d) pack_mat4(Mat4::Identity(), y.data() + off_d);
  if (spec.want_n) y.segment<3>(off_n) = n0;

  const double gap_floor = 1e-8 * set.cst.mc2();

  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    Vec3 x = s.segment<3>(0), p = s.segment<3>(3);
    Vec3 dx, dp;
    flow_rhs(set, b, x, p, dx, dp);
    ds.segment<3>(0) = dx;
    ds.segment<3>(3) = dp;
    if (set.gap(x, p) < gap_floor)
      throw GapViolation("transport trajectory approached the shell contact");
    Vec3 C;
    if (spec.want_D || spec.want_n) C = effective_spin_field(set, b, x, p);
    if (spec.want_D) {
      Mat2 D = unpack_mat2(s.data() + off_D);
      Mat2 dD = -I * (0.5 * pauli_dot(C)) * D;
      pack_mat2(dD, ds.data() + off_D);
    }
    if (spec.want_d) {
      Mat4 d = unpack_mat4(s.data() + off_d);
      Mat4 dd = -I * (effective_spin_hamiltonian(set, b, x, p) * d);
      pack_mat4(dd, ds.data() + off_d);
    }
    if (spec.want_n) {
      Vec3 n = s.segment<3>(off_n);
      ds.segment<3>(off_n) = C.cross(n);
    }
  };

  double drift = 0.0;
  auto hook = [&](double, Eigen::VectorXd& s) {
    if (spec.want_D) {
      Mat2 D = unpack_mat2(s.data() + off_D);
      drift = std::max(drift, su2_restore(D));
      pack_mat2(D, s.data() + off_D);
    }
    if (spec.want_d) {
      Mat4 d = unpack_mat4(s.data() + off_d);
      drift = std::max(drift, polar_restore(d));
      pack_mat4(d, s.data() + off_d);
    }
    if (spec.want_n) {
      Vec3 n = s.segment<3>(off_n);
      drift = std::max(drift, std::abs(n.norm() - 1.0));
      s.segment<3>(off_n) = n.normalized();
    }
  };

  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;
  integrate_dp54(rhs, 0.0, t, y, opt, hook);

  TransportState out;
  out.z.x = y.segment<3>(0);
  out.z.p = y.segment<3>(3);
  if (spec.want_D) out.D = unpack_mat2(y.data() + off_D);
  if (spec.want_d) {
    out.d = unpack_mat4(y.data() + off_d);
    out.has_d = true;
  }
  if (spec.want_n) out.n = y.segment<3>(off_n);
  out.t = t;
  out.branch = b;
  out.restoration_drift = drift;
  return out;
}

}  // namespace

void flow_rhs(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p, Vec3& dx,
              Vec3& dp) {
  Jet h = set.h(b).jet(seed_phase(x, p, JetContext{3, 1}));
  for (int a = 0; a < 3; ++a) {
    ExpoVec ex{}, ep{};
    ex[a] = 1;
    ep[3 + a] = 1;
    dx[a] = std::real(h.partial(ep));
    dp[a] = -std::real(h.partial(ex));
  }
}

PhasePoint hamiltonian_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0, double t,
                            double tol) {
  return integrate_transport(set, b, z0, Vec3::UnitZ(), t, tol, {}).z;
}

TransportState spin_transport_2x2(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                  double t, double tol) {
  TransportSpec spec;
  spec.want_D = true;
  return integrate_transport(set, b, z0, Vec3::UnitZ(), t, tol, spec);
}

TransportState spin_transport_4x4(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                  double t, double tol) {
  TransportSpec spec;
  spec.want_D = true;
  spec.want_d = true;
  return integrate_transport(set, b, z0, Vec3::UnitZ(), t, tol, spec);
}

Vec3 precess_spin(const DiracSymbolSet& set, Branch b, const PhasePoint& z0, const Vec3& n0,
                  double t, double tol) {
  TransportSpec spec;
  spec.want_n = true;
  return integrate_transport(set, b, z0, n0, t, tol, spec).n;
}

TransportState skew_product_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                 const Vec3& n0, double t, double tol) {
  TransportSpec spec;
  spec.want_D = true;
  TransportState s = integrate_transport(set, b, z0, n0, t, tol, spec);
  s.n = su2_to_so3(s.D) * n0;
  return s;
}

FlowSample sample_skew_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                            const Vec3& n0, const std::vector<double>& times, double tol) {
  FlowSample out;
  const double E0 = std::real(set.h(b).value(z0.x, z0.p));
  TransportState s;
  s.z = z0;
  double prev_t = 0.0;
  // carry (z, D) forward between sample times
  Eigen::VectorXd y(14);
  y.segment<3>(0) = z0.x;
  y.segment<3>(3) = z0.p;
  pack_mat2(Mat2::Identity(), y.data() + 6);

  auto rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
    Vec3 x = v.segment<3>(0), p = v.segment<3>(3);
    Vec3 dx, dp;
    flow_rhs(set, b, x, p, dx, dp);
    dv.segment<3>(0) = dx;
    dv.segment<3>(3) = dp;
    Vec3 C = effective_spin_field(set, b, x, p);
    Mat2 D = unpack_mat2(v.data() + 6);
    pack_mat2(Mat2(-I * (0.5 * pauli_dot(C)) * D), dv.data() + 6);
  };
  auto hook = [&](double, Eigen::VectorXd& v) {
    Mat2 D = unpack_mat2(v.data() + 6);
    su2_restore(D);
    pack_mat2(D, v.data() + 6);
  };

  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;

  for (double tt : times) {
    if (tt != prev_t) integrate_dp54(rhs, prev_t, tt, y, opt, hook);
    prev_t = tt;
    PhasePoint z{y.segment<3>(0), y.segment<3>(3)};
    Mat2 D = unpack_mat2(y.data() + 6);
    Vec3 n = su2_to_so3(D) * n0;
    double en = std::real(set.h(b).value(z.x, z.p));
    out.t.push_back(tt);
    out.z.push_back(z);
    out.n.push_back(n);
    out.energy.push_back(en);
    Vec3 kin = set.cst.c * z.p - set.cst.e * set.preset.A_at(z.x);
    out.helicity.push_back(kin.norm() > 1e-12 ? n.dot(kin.normalized()) : 0.0);
    out.energy_drift = std::max(out.energy_drift, std::abs(en - E0));
  }
  return out;
}

double cyclotron_frequency(const DiracSymbolSet& set, const PhasePoint& z) {
  const double eps = std::real(set.eps.value(z.x, z.p));
  return set.cst.e * set.cst.c * set.preset.B_at(z.x).norm() / eps;
}

double estimate_orbit_period(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                             double tol, double t_max) {
  // crossing detector on the reduced (x1, p1) oscillation
  const double x10 = z0.x[0], p10 = z0.p[0];
  const bool use_x = std::abs(p10) > 1e-10;  // start not at a turning point
  double wc = cyclotron_frequency(set, z0);
  double dt = (wc > 1e-6) ? 0.02 * 2.0 * M_PI / wc : t_max / 20000.0;

  Eigen::VectorXd y(6);
  y.segment<3>(0) = z0.x;
  y.segment<3>(3) = z0.p;
  auto rhs = [&](double, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
    Vec3 dx, dp;
    flow_rhs(set, b, v.segment<3>(0), v.segment<3>(3), dx, dp);
    dv.segment<3>(0) = dx;
    dv.segment<3>(3) = dp;
  };
  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;

  auto signal = [&](const Eigen::VectorXd& v) { return use_x ? v[0] - x10 : v[3] - p10; };
  auto cosignal = [&](const Eigen::VectorXd& v) { return use_x ? v[3] : v[0] - x10; };

  double prev = signal(y);
  double t = 0.0;
  bool armed = false;
  const double co_init = cosignal(y);
  for (int k = 1; t < t_max; ++k) {
    double tn = k * dt;
    integrate_dp54(rhs, t, tn, y, opt);
    double cur = signal(y), cur_co = cosignal(y);
    if (!armed && (std::abs(cur) > 1e-3 || cur * prev < 0)) armed = true;
    if (armed && prev * cur <= 0.0 && cur_co * co_init > 0.0 && tn > 4 * dt) {
      // linear interpolation of the crossing time
      double frac = prev / (prev - cur);
      return t + frac * (tn - t);
    }
    prev = cur;
    t = tn;
  }
  throw NumericalFailure("estimate_orbit_period: no return found within t_max");
}

InvarianceCheck measure_invariance_check(const DiracSymbolSet& set, Branch b, double E,
                                         const SphereObservable& obs, long samples, double t,
                                         const ShellSamplerOptions& opt) {
  const double mc2 = set.cst.mc2();
  const double c = set.cst.c, e = set.cst.e;
  const Vec3 box = set.preset.box;

  // momentum box from the shell bound |c p - e A| <= sqrt((E - e phi)^2 - (m c^2)^2)
  Vec3 p_lo = Vec3::Constant(1e300), p_hi = Vec3::Constant(-1e300);
  bool feasible = false;
  const int nx = 17;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      for (int k = 0; k < nx; ++k) {
        Vec3 x(box[0] * i / nx, box[1] * j / nx, box[2] * k / nx);
        double rad2 = std::pow(E - e * set.preset.phi_at(x), 2) - mc2 * mc2;
        double kin = branch_sign(b) * (E - e * set.preset.phi_at(x));
        if (rad2 < 0.0 || kin < 0.0) continue;
        feasible = true;
        Vec3 A = set.preset.A_at(x);
        for (int a = 0; a < 3; ++a) {
          p_lo[a] = std::min(p_lo[a], (e * A[a] - std::sqrt(rad2)) / c - opt.p_margin);
          p_hi[a] = std::max(p_hi[a], (e * A[a] + std::sqrt(rad2)) / c + opt.p_margin);
        }
      }
  if (!feasible) throw EmptyShell("no phase-space solutions of h = E on the sampling cell");

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double sw = 0.0, swb = 0.0, swa = 0.0;
  std::vector<double> ws, bs, as;
  long accepted = 0;
  for (long draw = 0; draw < opt.max_draws && accepted < samples; ++draw) {
    Vec3 x(box[0] * u01(rng), box[1] * u01(rng), box[2] * u01(rng));
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = p_lo[a] + (p_hi[a] - p_lo[a]) * u01(rng);
    double h = std::real(set.h(b).value(x, p));
    if (std::abs(h - E) > opt.window) continue;
    Vec3 n(gauss(rng), gauss(rng), gauss(rng));
    double nn = n.norm();
    if (nn < 1e-8) continue;
    n /= nn;

    Vec3 gx, gp;
    flow_rhs(set, b, x, p, gp, gx);  // gp = grad_p h, gx = -grad_x h
    double grad = std::sqrt(gp.squaredNorm() + gx.squaredNorm());
    double w = 1.0 / std::max(grad, 1e-12);

    double before = obs(x, p, n);
    TransportState after = skew_product_flow(set, b, PhasePoint{x, p}, n, t, opt.flow_tol);
    double val_after = obs(after.z.x, after.z.p, after.n);

    ws.push_back(w);
    bs.push_back(before);
    as.push_back(val_after);
    sw += w;
    swb += w * before;
    swa += w * val_after;
    ++accepted;
  }
  if (accepted == 0) throw EmptyShell("shell sampler accepted no points");

  InvarianceCheck out;
  out.accepted = accepted;
  out.mean_before = swb / sw;
  out.mean_after = swa / sw;
  double vb = 0.0, va = 0.0;
  for (long i = 0; i < accepted; ++i) {
    vb += ws[i] * ws[i] * std::pow(bs[i] - out.mean_before, 2);
    va += ws[i] * ws[i] * std::pow(as[i] - out.mean_after, 2);
  }
  out.se_before = std::sqrt(vb) / sw;
  out.se_after = std::sqrt(va) / sw;
  return out;
}

}  // namespace diraclab
