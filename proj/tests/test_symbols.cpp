#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diraclab/dirac_model.hpp"
#include "diraclab/symbol.hpp"

using namespace diraclab;

namespace {

std::mt19937_64 rng(20240517u);

Vec3 rand_vec(double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

DiracSymbolSet periodic_model() {
  return build_model(preset_periodic_phi(0.3, Vec3::Constant(2 * M_PI)), Constants{});
}

DiracSymbolSet magnetic_model() {
  return build_model(preset_periodic_b(1.0, Vec3::Constant(2 * M_PI)), Constants{});
}

double herm_defect(const Mat4& m) { return (m - m.adjoint()).norm(); }

}  // namespace

TEST_CASE("identity is the star unit") {
  auto set = periodic_model();
  SymbolExpansion idc = SymbolExpansion::from_symbol(identity_symbol());
  SymbolExpansion b = SymbolExpansion::from_symbol(set.H);
  SymbolExpansion prod = star_product(idc, b, 2);
  for (int trial = 0; trial < 4; ++trial) {
    Vec3 x = rand_vec(3.0), p = rand_vec(1.5);
    CHECK((prod.coeff_power(0).value(x, p) - set.H.value(x, p)).norm() < 1e-12);
    CHECK(prod.coeff_power(1).value(x, p).norm() < 1e-12);
    CHECK(prod.coeff_power(2).value(x, p).norm() < 1e-12);
  }
}

TEST_CASE("order zero term is the pointwise product") {
  auto set = magnetic_model();
  SymbolExpansion a = SymbolExpansion::from_symbol(set.H);
  SymbolExpansion b = SymbolExpansion::from_symbol(set.Pi0_plus);
  SymbolExpansion prod = star_product(a, b, 1);
  Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
  Mat4 want = set.H.value(x, p) * set.Pi0_plus.value(x, p);
  CHECK((prod.coeff_power(0).value(x, p) - want).norm() < 1e-12);
}

TEST_CASE("canonical pair star commutator") {
  // (x1 # p1 - p1 # x1) = i hbar, other pairs commute
  for (int axis = 0; axis < 3; ++axis) {
    SymbolExpansion xs = SymbolExpansion::from_symbol(coordinate_symbol(axis, false));
    for (int paxis = 0; paxis < 3; ++paxis) {
      SymbolExpansion ps = SymbolExpansion::from_symbol(coordinate_symbol(paxis, true));
      SymbolExpansion ab = star_product(xs, ps, 1);
      SymbolExpansion ba = star_product(ps, xs, 1);
      Vec3 x = rand_vec(2.0), p = rand_vec(2.0);
      Mat4 diff = ab.coeff_power(1).value(x, p) - ba.coeff_power(1).value(x, p);
      Mat4 want = (axis == paxis) ? Mat4(cplx(0, 1) * Mat4::Identity()) : Mat4(Mat4::Zero());
      CHECK((diff - want).norm() < 1e-13);
      CHECK((ab.coeff_power(0).value(x, p) - ba.coeff_power(0).value(x, p)).norm() < 1e-13);
    }
  }
}

TEST_CASE("star product is associative order by order") {
  auto set = magnetic_model();
  SymbolExpansion a = SymbolExpansion::from_symbol(set.H);
  SymbolExpansion b = SymbolExpansion::from_symbol(set.Pi0_plus);
  SymbolExpansion c = SymbolExpansion::from_symbol(
      sym_add(coordinate_symbol(0, true), constant_symbol(dirac_alpha(2))));
  SymbolExpansion lhs = star_product(star_product(a, b, 2), c, 2);
  SymbolExpansion rhs = star_product(a, star_product(b, c, 2), 2);
  for (int trial = 0; trial < 3; ++trial) {
    Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
    for (int k = 0; k <= 2; ++k) {
      Mat4 l = lhs.coeff_power(k).value(x, p);
      Mat4 r = rhs.coeff_power(k).value(x, p);
      CHECK((l - r).norm() < 1e-10 * (1.0 + l.norm()));
    }
  }
}

TEST_CASE("conjugate transpose reverses the star product") {
  auto set = magnetic_model();
  SymbolExpansion a = SymbolExpansion::from_symbol(set.H);
  SymbolExpansion b = SymbolExpansion::from_symbol(set.Pi0_minus);
  SymbolExpansion ab_adj = star_product(a, b, 2).adjoint();
  SymbolExpansion ba = star_product(b.adjoint(), a.adjoint(), 2);
  Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
  for (int k = 0; k <= 2; ++k)
    CHECK((ab_adj.coeff_power(k).value(x, p) - ba.coeff_power(k).value(x, p)).norm() < 1e-11);
}

TEST_CASE("moyal commutator of a symbol with itself vanishes") {
  auto set = magnetic_model();
  SymbolExpansion a = SymbolExpansion::from_symbol(set.Pi0_plus);
  SymbolExpansion comm = moyal_commutator(a, a, 1);
  Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
  for (int k = comm.lowest_power(); k <= 1; ++k)
    CHECK(comm.coeff_power(k).value(x, p).norm() < 1e-12);
}

TEST_CASE("scalar moyal commutator reduces to the poisson bracket") {
  auto set = periodic_model();
  ScalarSymbol h = set.h_plus;
  ScalarSymbol f(
      [](const PhaseJets& s) {
        return jet_sin(s.x[0]) * s.p[1] + cplx(0.5) * s.p[0] * s.p[0];
      },
      JetTable::max_degree);
  SymbolExpansion a = SymbolExpansion::from_symbol(h.times_identity());
  SymbolExpansion b = SymbolExpansion::from_symbol(f.times_identity());
  SymbolExpansion comm = moyal_commutator(a, b, 0);
  MatrixSymbol pb = matrix_poisson_bracket(h.times_identity(), f.times_identity());

  Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
  // matrix commutator coefficient at 1/hbar vanishes for scalars
  CHECK(comm.coeff_power(-1).value(x, p).norm() < 1e-13);
  Mat4 lead = comm.coeff_power(0).value(x, p);
  CHECK((lead - pb.value(x, p)).norm() < 1e-12);
}

TEST_CASE("heisenberg leading term for the hamiltonian and a projection") {
  // i/hbar (H # Pi - Pi # H): the matrix commutator term vanishes pointwise
  // and the hbar^0 coefficient is the symmetrised poisson-bracket combination.
  auto set = magnetic_model();
  SymbolExpansion a = SymbolExpansion::from_symbol(set.H);
  SymbolExpansion b = SymbolExpansion::from_symbol(set.Pi0_plus);
  SymbolExpansion comm = moyal_commutator(a, b, 0);
  MatrixSymbol hp = matrix_poisson_bracket(set.H, set.Pi0_plus);
  MatrixSymbol ph = matrix_poisson_bracket(set.Pi0_plus, set.H);
  for (int trial = 0; trial < 3; ++trial) {
    Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
    CHECK(comm.coeff_power(-1).value(x, p).norm() < 1e-12);
    Mat4 lead = comm.coeff_power(0).value(x, p);
    Mat4 want = 0.5 * (hp.value(x, p) - ph.value(x, p));
    CHECK((lead - want).norm() < 1e-11 * (1.0 + want.norm()));
  }
}

TEST_CASE("poisson bracket identities") {
  auto set = magnetic_model();
  Vec3 x = rand_vec(2.0), p = rand_vec(1.0);

  // {h, x_k} is the velocity component dh/dp_k
  for (int k = 0; k < 3; ++k) {
    MatrixSymbol b =
        matrix_poisson_bracket(set.h_plus.times_identity(), coordinate_symbol(k, false));
    PhaseMultiIndex mi;
    mi.p[k] = 1;
    Mat4 want = set.h_plus.times_identity().derivative(x, p, mi);
    CHECK((b.value(x, p) - want).norm() < 1e-12);
  }

  // {A, A} = 0 for scalar symbols
  MatrixSymbol s = set.h_minus.times_identity();
  CHECK(matrix_poisson_bracket(s, s).value(x, p).norm() < 1e-12);

  // {Pi0, Pi0} is generally nonzero once A(x) couples x and p ...
  Mat4 bb = matrix_poisson_bracket(set.Pi0_plus, set.Pi0_plus).value(x, p);
  CHECK(bb.norm() > 1e-6);

  // ... and vanishes identically when the projection is x-independent
  auto set0 = periodic_model();
  CHECK(matrix_poisson_bracket(set0.Pi0_plus, set0.Pi0_plus).value(x, p).norm() < 1e-13);
}

TEST_CASE("poisson bracket against finite differences") {
  auto set = magnetic_model();
  MatrixSymbol pb = matrix_poisson_bracket(set.Pi0_plus, set.Pi0_plus);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
    Mat4 acc = Mat4::Zero();
    auto P = [&](const Vec3& xx, const Vec3& pp) { return set.Pi0_plus.value(xx, pp); };
    for (int a = 0; a < 3; ++a) {
      Vec3 ex = Vec3::Unit(a) * h;
      Mat4 dPx = (P(x + ex, p) - P(x - ex, p)) / (2 * h);
      Mat4 dPp = (P(x, p + ex) - P(x, p - ex)) / (2 * h);
      acc += dPp * dPx - dPx * dPp;
    }
    CHECK((pb.value(x, p) - acc).norm() < 1e-6 * (1.0 + acc.norm()));
  }
}

TEST_CASE("derivative oracles match finite differences") {
  auto set = magnetic_model();
  const double h = 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    Vec3 x = rand_vec(2.0), p = rand_vec(1.0);
    for (int a = 0; a < 3; ++a) {
      PhaseMultiIndex mi;
      mi.x[a] = 1;
      Mat4 d = set.Pi0_plus.derivative(x, p, mi);
      Vec3 ex = Vec3::Unit(a) * h;
      Mat4 fd = (set.Pi0_plus.value(x + ex, p) - set.Pi0_plus.value(x - ex, p)) / (2 * h);
      CHECK((d - fd).norm() < 1e-6 * (1.0 + d.norm()));

      PhaseMultiIndex mi2;
      mi2.p[a] = 2;
      Mat4 d2 = set.H.derivative(x, p, mi2);
      Mat4 fd2 =
          (set.H.value(x, p + ex) - 2 * set.H.value(x, p) + set.H.value(x, p - ex)) / (h * h);
      CHECK((d2 - fd2).norm() < 1e-5 * (1.0 + d2.norm()));
    }
  }
}

TEST_CASE("reduced-dimension jets freeze transverse axes") {
  auto set = magnetic_model();
  Vec3 x(0.7, 0.0, 0.0), p(0.4, 0.2, 0.0);
  Mat4 full = set.H.value(x, p, 3);
  Mat4 red = set.H.value(x, p, 1);
  CHECK((full - red).norm() < 1e-14);
  PhaseMultiIndex mi;
  mi.x[1] = 1;
  CHECK_THROWS_AS(set.H.derivative(x, p, mi, 1), InsufficientDerivativeOrder);
}

TEST_CASE("hermitian symbols evaluate hermitian") {
  auto set = magnetic_model();
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 x = rand_vec(3.0), p = rand_vec(2.0);
    CHECK(herm_defect(set.H.value(x, p)) < 1e-12);
    CHECK(herm_defect(set.Pi0_plus.value(x, p)) < 1e-12);
  }
}
