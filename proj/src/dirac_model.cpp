#include "diraclab/dirac_model.hpp"

#include <cmath>
#include <random>

namespace diraclab {

namespace {

const cplx I(0.0, 1.0);

JetMat4 mat_times_jet(const Mat4& m, const Jet& j) {
  JetMat4 r(j.table());
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (m(a, b) != cplx(0.0)) r(a, b) = m(a, b) * j;
  return r;
}

// kinetic momentum c p - e A(x) as jets
std::array<Jet, 3> kinetic_jets(const FieldPreset& preset, const Constants& cst,
                                const PhaseJets& s) {
  FieldPreset::XJets A = preset.vecA(s.x);
  std::array<Jet, 3> pi;
  for (int a = 0; a < 3; ++a) pi[a] = cplx(cst.c) * s.p[a] - cplx(cst.e) * A[a];
  return pi;
}

Jet eps_jet(const FieldPreset& preset, const Constants& cst, const PhaseJets& s) {
  auto pi = kinetic_jets(preset, cst, s);
  Jet sq = pi[0] * pi[0] + pi[1] * pi[1] + pi[2] * pi[2];
  sq += cplx(cst.mc2() * cst.mc2());
  return jet_sqrt(sq);
}

}  // namespace

JetMat42 DiracSymbolSet::isometry_jets(Branch b, const PhaseJets& s) const {
  auto pi = kinetic_jets(preset, cst, s);
  Jet e = eps_jet(preset, cst, s);
  Jet norm = jet_inv(jet_sqrt(cplx(2.0) * e * (e + cplx(cst.mc2()))));
  Jet diag = e + cplx(cst.mc2());

  // pi . sigma in the 2x2 block
  JetMat2 ps(*s.tab);
  ps(0, 0) = pi[2];
  ps(0, 1) = pi[0] - I * pi[1];
  ps(1, 0) = pi[0] + I * pi[1];
  ps(1, 1) = cplx(-1.0) * pi[2];

  JetMat42 v(*s.tab);
  if (b == Branch::plus) {
    v(0, 0) = diag;
    v(1, 1) = diag;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v(2 + i, j) = ps(i, j);
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v(i, j) = ps(i, j);
    v(2, 0) = cplx(-1.0) * diag;
    v(3, 1) = cplx(-1.0) * diag;
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) v(i, j) = v(i, j) * norm;
  return v;
}

Mat42 DiracSymbolSet::isometry(Branch b, const Vec3& x, const Vec3& p) const {
  return isometry_jets(b, seed_phase(x, p, JetContext{3, 0})).value();
}

double DiracSymbolSet::gap(const Vec3& x, const Vec3& p) const {
  return std::real(h_plus.value(x, p) - h_minus.value(x, p));
}

DiracSymbolSet build_model(const FieldPreset& preset, const Constants& cst) {
  if (cst.m <= 0.0 || cst.c <= 0.0)
    throw ConfigError("build_model: m and c must be positive");

  DiracSymbolSet set;
  set.preset = preset;
  set.cst = cst;
  set.eps_lower_bound = cst.mc2();

  const FieldPreset pf = preset;
  const Constants ct = cst;

  set.eps = ScalarSymbol([pf, ct](const PhaseJets& s) { return eps_jet(pf, ct, s); },
                         JetTable::max_degree);

  set.h_plus = ScalarSymbol(
      [pf, ct](const PhaseJets& s) {
        return cplx(ct.e) * pf.phi(s.x) + eps_jet(pf, ct, s);
      },
      JetTable::max_degree);
  set.h_minus = ScalarSymbol(
      [pf, ct](const PhaseJets& s) {
        return cplx(ct.e) * pf.phi(s.x) - eps_jet(pf, ct, s);
      },
      JetTable::max_degree);

  auto kinetic_matrix = [pf, ct](const PhaseJets& s) {
    auto pi = kinetic_jets(pf, ct, s);
    JetMat4 m = mat_times_jet(dirac_alpha(0), pi[0]);
    m += mat_times_jet(dirac_alpha(1), pi[1]);
    m += mat_times_jet(dirac_alpha(2), pi[2]);
    m += JetMat4::constant(*s.tab, dirac_beta() * ct.mc2());
    return m;
  };

  set.H = MatrixSymbol(
      [pf, ct, kinetic_matrix](const PhaseJets& s) {
        JetMat4 m = kinetic_matrix(s);
        Jet f = cplx(ct.e) * pf.phi(s.x);
        for (int i = 0; i < 4; ++i) m(i, i) += f;
        return m;
      },
      JetTable::max_degree, true);

  auto projector = [pf, ct, kinetic_matrix](const PhaseJets& s, double sign) {
    JetMat4 m = kinetic_matrix(s);
    Jet inv_eps = jet_inv(eps_jet(pf, ct, s));
    JetMat4 r(*s.tab);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) = cplx(0.5 * sign) * (m(i, j) * inv_eps);
    for (int i = 0; i < 4; ++i) r(i, i) += cplx(0.5);
    return r;
  };
  set.Pi0_plus = MatrixSymbol([projector](const PhaseJets& s) { return projector(s, 1.0); },
                              JetTable::max_degree, true);
  set.Pi0_minus = MatrixSymbol([projector](const PhaseJets& s) { return projector(s, -1.0); },
                               JetTable::max_degree, true);

  // Gap condition: the variation of e phi over the cell must stay below
  // 2 m c^2. Checked on a deterministic lattice sample.
  double lo = 1e300, hi = -1e300;
  Vec3 lo_x, hi_x;
  const int n = 13;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x(preset.box[0] * i / n, preset.box[1] * j / n, preset.box[2] * k / n);
        if (!preset.grid_compatible) x = (x - 0.5 * preset.box) * 4.0;
        double v = cst.e * preset.phi_at(x);
        if (v < lo) { lo = v; lo_x = x; }
        if (v > hi) { hi = v; hi_x = x; }
      }
  if (hi - lo >= 2.0 * cst.mc2()) {
    throw GapViolation("gap condition violated: e phi varies by " + std::to_string(hi - lo) +
                       " >= 2 m c^2, extremes at x = (" + std::to_string(hi_x[0]) + "," +
                       std::to_string(hi_x[1]) + "," + std::to_string(hi_x[2]) + ")");
  }
  return set;
}

Vec3 effective_spin_field(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p) {
  const double c = set.cst.c, e = set.cst.e, mc2 = set.cst.mc2();
  const double eps = std::real(set.eps.value(x, p));
  const Vec3 B = set.preset.B_at(x);
  const Vec3 E = set.preset.E_at(x);
  const Vec3 kin = c * p - e * set.preset.A_at(x);
  const double s = branch_sign(b);
  Vec3 field = B + s / (eps + mc2) * (c * E).cross(kin);
  return -s * (e * c / eps) * field;
}

Mat4 effective_spin_hamiltonian(const DiracSymbolSet& set, Branch b, const Vec3& x,
                                const Vec3& p) {
  PhaseJets s = seed_phase(x, p, JetContext{3, 1});
  JetMat4 Pj = set.Pi0(b).jets(s);
  JetMat4 Hj = set.H.jets(s);
  Jet hj = set.h(b).jet(s);

  Mat4 P = Pj.value();
  Mat4 H = Hj.value();
  cplx h = hj.value();

  Mat4 Px[3], Pp[3], Hx[3], Hp[3];
  cplx hx[3], hp[3];
  for (int a = 0; a < 3; ++a) {
    ExpoVec ex{}, ep{};
    ex[a] = 1;
    ep[3 + a] = 1;
    Px[a] = Pj.partial(ex);
    Pp[a] = Pj.partial(ep);
    Hx[a] = Hj.partial(ex);
    Hp[a] = Hj.partial(ep);
    hx[a] = hj.partial(ex);
    hp[a] = hj.partial(ep);
  }

  // {h, P} and P-diagonal pieces of the curvature terms
  Mat4 hP = Mat4::Zero();
  Mat4 PP = Mat4::Zero();
  Mat4 PK = Mat4::Zero();
  for (int a = 0; a < 3; ++a) {
    hP += hp[a] * Px[a] - hx[a] * Pp[a];
    PP += Pp[a] * Px[a] - Px[a] * Pp[a];
    Mat4 Kx = Hx[a] - hx[a] * P - h * Px[a];
    Mat4 Kp = Hp[a] - hp[a] * P - h * Pp[a];
    PK += Pp[a] * Kx - Px[a] * Kp;
  }

  // The in-block group enters with a minus sign: this is the unique choice
  // for which the conjugated transport V*(flow) d V solves the 2x2 equation
  // with generator C.sigma/2 (checked exactly in the tests), and it
  // reproduces the rest-frame precession of the Pauli equation.
  Mat4 term1 = -I * (P * hP - hP * P);
  Mat4 term2 = cplx(0.0, -0.5) * (h * (P * PP * P) + P * PK * P);
  return term1 + term2;
}

Mat2 isometry_connection(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p) {
  PhaseJets s = seed_phase(x, p, JetContext{3, 1});
  JetMat42 Vj = set.isometry_jets(b, s);
  Jet hj = set.h(b).jet(s);
  Mat42 V = Vj.value();

  Mat24 dV = Mat24::Zero();  // {h, V*}
  for (int a = 0; a < 3; ++a) {
    ExpoVec ex{}, ep{};
    ex[a] = 1;
    ep[3 + a] = 1;
    Mat42 Vx = Vj.partial(ex);
    Mat42 Vp = Vj.partial(ep);
    dV += std::real(hj.partial(ep)) * Vx.adjoint() - std::real(hj.partial(ex)) * Vp.adjoint();
  }
  return I * (dV * V);
}

}  // namespace diraclab
