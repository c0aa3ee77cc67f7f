#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diraclab/classical.hpp"
#include "diraclab/sphere.hpp"

using namespace diraclab;

namespace {

DiracSymbolSet free_model() { return build_model(preset_free(), Constants{}); }

DiracSymbolSet uniform_b(double B0 = 1.0) {
  return build_model(preset_constant_b(Vec3(0, 0, B0)), Constants{});
}

}  // namespace

TEST_CASE("free flow is a straight line below light speed") {
  auto set = free_model();
  PhasePoint z0{Vec3(0.3, -0.1, 0.2), Vec3(0.9, -0.4, 0.25)};
  double t = 3.7;
  PhasePoint z = hamiltonian_flow(set, Branch::plus, z0, t, 1e-12);
  double eps = std::sqrt(z0.p.squaredNorm() + 1.0);
  Vec3 v = z0.p / eps;
  CHECK(v.norm() < 1.0);
  CHECK((z.x - (z0.x + t * v)).norm() < 1e-9);
  CHECK((z.p - z0.p).norm() < 1e-11);

  // t = 0 is the identity
  PhasePoint zid = hamiltonian_flow(set, Branch::plus, z0, 0.0);
  CHECK((zid.x - z0.x).norm() == 0.0);
}

TEST_CASE("cyclotron orbit closes at the relativistic frequency") {
  double B0 = 1.3;
  auto set = uniform_b(B0);
  PhasePoint z0{Vec3::Zero(), Vec3(0.8, 0.0, 0.0)};
  // uniform field: kinetic = canonical at the origin
  double eps = std::sqrt(z0.p.squaredNorm() + 1.0);
  double T = 2.0 * M_PI * eps / B0;  // e = c = 1
  CHECK(cyclotron_frequency(set, z0) == doctest::Approx(B0 / eps).epsilon(1e-12));

  PhasePoint z = hamiltonian_flow(set, Branch::plus, z0, T, 1e-12);
  double scale = 1.0 + z0.x.norm() + z0.p.norm();
  CHECK((z.x - z0.x).norm() + (z.p - z0.p).norm() < 1e-8 * scale);

  // energy conservation along the way
  double tol = 1e-11;
  PhasePoint mid = hamiltonian_flow(set, Branch::plus, z0, 0.37 * T, tol);
  CHECK(std::abs(std::real(set.h_plus.value(mid.x, mid.p)) -
                 std::real(set.h_plus.value(z0.x, z0.p))) < 100 * tol * T);
}

TEST_CASE("free spin transport is trivial") {
  auto set = free_model();
  PhasePoint z0{Vec3::Zero(), Vec3(0.5, 0.2, -0.1)};
  TransportState s = spin_transport_4x4(set, Branch::plus, z0, 2.5, 1e-11);
  CHECK((s.D - Mat2::Identity()).norm() < 1e-9);
  CHECK((s.d - Mat4::Identity()).norm() < 1e-9);
  Vec3 n0 = Vec3(1, 2, 2).normalized();
  CHECK((precess_spin(set, Branch::plus, z0, n0, 2.5, 1e-11) - n0).norm() < 1e-9);
}

TEST_CASE("at-rest precession about the field axis") {
  double B0 = 1.5;
  auto set = uniform_b(B0);
  Vec3 x0(0.4, -0.2, 0.0);
  PhasePoint z0{x0, set.preset.A_at(x0)};  // kinetic momentum zero
  Vec3 C = effective_spin_field(set, Branch::plus, z0.x, z0.p);
  CHECK((C - Vec3(0, 0, -B0)).norm() < 1e-13);  // eps = m c^2 at rest

  double t = 1.234;
  TransportState s = spin_transport_2x2(set, Branch::plus, z0, t, 1e-12);
  Mat2 want = (cplx(std::cos(0.5 * C.norm() * t), 0) * Mat2::Identity() +
               cplx(0, std::sin(0.5 * C.norm() * t)) * pauli(2));
  // exp(-i C.sigma t/2) with C along -e3
  CHECK((s.D - want).norm() < 1e-10);

  // spin perpendicular to B precesses by |C| t
  Vec3 n0 = Vec3::UnitX();
  Vec3 n = precess_spin(set, Branch::plus, z0, n0, t, 1e-12);
  double angle = std::atan2(n0.cross(n).dot(Vec3::UnitZ()), n0.dot(n));
  double want_angle = std::remainder(-C.norm() * t, 2 * M_PI);
  CHECK(std::abs(std::remainder(angle - want_angle, 2 * M_PI)) < 1e-8);
  CHECK(std::abs(n.norm() - 1.0) < 1e-10);
}

TEST_CASE("transport matrices stay in the structure groups") {
  auto set = uniform_b(0.9);
  PhasePoint z0{Vec3(0.1, 0.2, 0.0), Vec3(0.7, -0.3, 0.2)};
  for (double t : {0.7, 2.9}) {
    TransportState s = spin_transport_4x4(set, Branch::minus, z0, t, 1e-11);
    CHECK((s.D.adjoint() * s.D - Mat2::Identity()).norm() < 1e-10);
    CHECK(std::abs(s.D.determinant() - cplx(1.0)) < 1e-10);
    CHECK((s.d.adjoint() * s.d - Mat4::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("four and two dimensional transports are conjugate") {
  auto set = uniform_b(1.1);
  PhasePoint z0{Vec3(0.2, -0.3, 0.1), Vec3(0.8, 0.1, -0.2)};
  double eps = std::real(set.eps.value(z0.x, z0.p));
  double T = 2.0 * M_PI * eps / 1.1;  // one cyclotron period
  for (Branch b : {Branch::plus, Branch::minus}) {
    TransportState s = spin_transport_4x4(set, b, z0, T, 1e-12);
    Mat42 Vt = set.isometry(b, s.z.x, s.z.p);
    Mat42 V0 = set.isometry(b, z0.x, z0.p);
    CHECK((Vt.adjoint() * s.d * V0 - s.D).norm() < 1e-7);

    // the 4x4 transport maps the eigenspace at the start onto the
    // eigenspace at the endpoint
    Mat4 P0 = set.Pi0(b).value(z0.x, z0.p);
    Mat4 Pt = set.Pi0(b).value(s.z.x, s.z.p);
    CHECK((s.d * P0 - Pt * s.d).norm() < 1e-7);
  }
}

TEST_CASE("group law of the transports") {
  auto set = uniform_b(0.8);
  PhasePoint z0{Vec3(0.3, 0.1, -0.2), Vec3(0.5, -0.6, 0.1)};
  double t1 = 0.9, t2 = 1.7;
  TransportState a = spin_transport_2x2(set, Branch::plus, z0, t1, 1e-12);
  TransportState b = spin_transport_2x2(set, Branch::plus, a.z, t2, 1e-12);
  TransportState c = spin_transport_2x2(set, Branch::plus, z0, t1 + t2, 1e-12);
  CHECK((b.D * a.D - c.D).norm() < 1e-8);
  CHECK((b.z.x - c.z.x).norm() < 1e-8);
  CHECK((b.z.p - c.z.p).norm() < 1e-8);
}

TEST_CASE("skew product flow and cocycle") {
  auto set = uniform_b(1.0);
  PhasePoint z0{Vec3(0.0, 0.4, 0.0), Vec3(0.6, 0.0, 0.3)};
  Vec3 n0 = Vec3(2, -1, 1).normalized();

  // identity at t = 0
  TransportState s0 = skew_product_flow(set, Branch::plus, z0, n0, 0.0);
  CHECK((s0.n - n0).norm() < 1e-14);

  // composition matches a single integration
  TransportState s1 = skew_product_flow(set, Branch::plus, z0, n0, 1.1, 1e-12);
  TransportState s2 = skew_product_flow(set, Branch::plus, s1.z, s1.n, 0.7, 1e-12);
  TransportState s = skew_product_flow(set, Branch::plus, z0, n0, 1.8, 1e-12);
  CHECK((s2.n - s.n).norm() < 1e-8);
  CHECK((s2.z.x - s.z.x).norm() < 1e-8);

  // sphere transport equals the rotation of the 2x2 transport pathwise
  Vec3 n_ode = precess_spin(set, Branch::plus, z0, n0, 1.8, 1e-12);
  CHECK((n_ode - s.n).norm() < 1e-8);
}

TEST_CASE("helicity is conserved in a pure magnetic field") {
  auto set = uniform_b(1.4);
  PhasePoint z0{Vec3(0.2, 0.0, 0.0), Vec3(0.9, 0.1, 0.3)};
  Vec3 kin0 = z0.p - set.preset.A_at(z0.x);
  Vec3 n0 = (0.3 * Vec3::UnitZ() + kin0.normalized()).normalized();
  double eps = std::real(set.eps.value(z0.x, z0.p));
  double T = 2.0 * M_PI * eps / 1.4;

  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(T * k / 8.0);
  FlowSample fs = sample_skew_flow(set, Branch::plus, z0, n0, times, 1e-12);
  double h0 = n0.dot(kin0.normalized());
  for (double h : fs.helicity) CHECK(std::abs(h - h0) < 1e-8);
  CHECK(fs.energy_drift < 1e-9);
}

TEST_CASE("orbit period estimation on the periodic magnetic preset") {
  auto set = build_model(preset_periodic_b(1.0, Vec3::Constant(M_PI)), Constants{});
  PhasePoint z0{Vec3(M_PI / 2, 0.0, 0.0), Vec3(0.4, 0.0, 0.0)};
  double T = estimate_orbit_period(set, Branch::plus, z0, 1e-10);
  CHECK(T > 0.1);
  PhasePoint z = hamiltonian_flow(set, Branch::plus, z0, T, 1e-11);
  CHECK(std::abs(z.x[0] - z0.x[0]) < 1e-3);
  CHECK(std::abs(z.p[0] - z0.p[0]) < 1e-3);
}

TEST_CASE("invariance of the shell measure under the skew flow") {
  auto set = uniform_b(1.0);
  double E = 1.6;

  // constant observable: both means are exactly one
  InvarianceCheck c0 = measure_invariance_check(
      set, Branch::plus, E, [](const Vec3&, const Vec3&, const Vec3&) { return 1.0; }, 400, 0.8);
  CHECK(c0.mean_before == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c0.mean_after == doctest::Approx(1.0).epsilon(1e-14));

  // n3 on the free preset: zero by symmetry on both sides
  auto fset = free_model();
  InvarianceCheck c1 = measure_invariance_check(
      fset, Branch::plus, 1.5, [](const Vec3&, const Vec3&, const Vec3& n) { return n[2]; }, 800,
      1.3);
  CHECK(std::abs(c1.mean_before) < 4 * c1.se_before);
  CHECK(std::abs(c1.mean_after) < 4 * c1.se_after);

  // a generic gauge-invariant observable in the uniform field
  ShellSamplerOptions opt;
  opt.seed = 77;
  auto obs = [&](const Vec3& x, const Vec3& p, const Vec3& n) {
    Vec3 kin = p - set.preset.A_at(x);
    return std::tanh(kin[0]) + 0.3 * n[1] * kin[1] + 0.1 * n[2];
  };
  InvarianceCheck c2 =
      measure_invariance_check(set, Branch::plus, E, obs, 1500, 0.9, opt);
  double se = std::hypot(c2.se_before, c2.se_after);
  CHECK(std::abs(c2.mean_before - c2.mean_after) < 3.5 * se);

  // empty shell is reported
  CHECK_THROWS_AS(measure_invariance_check(
                      set, Branch::plus, 0.5,
                      [](const Vec3&, const Vec3&, const Vec3&) { return 1.0; }, 10, 0.1),
                  EmptyShell);
}
