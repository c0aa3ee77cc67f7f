#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diraclab/egorov.hpp"

using namespace diraclab;

namespace {

DiracSymbolSet magnetic_set() {
  return build_model(preset_periodic_b(1.0, Vec3::Constant(4 * M_PI)), Constants{});
}

QuantumGrid magnetic_grid(double hbar) {
  int n = static_cast<int>(std::lround(25.6 / hbar));
  int p2 = 1;
  while (p2 < n) p2 *= 2;
  return make_grid(1, p2, 4 * M_PI, hbar);
}

}  // namespace

TEST_CASE("classical value equals the transported matrix block") {
  auto set = magnetic_set();
  Vec3 x0(2 * M_PI, 0, 0), p0(0.5, 0, 0), n0 = Vec3(1, 0, 1).normalized();
  MatrixSymbol obs = spin_block_observable(set, 2, false);
  for (double t : {0.0, 0.9, 2.3}) {
    double c = egorov_classical_value(set, Branch::plus, obs, x0, p0, n0, t, 1e-12);
    TransportState s = spin_transport_2x2(set, Branch::plus, PhasePoint{x0, p0}, t, 1e-12);
    Mat42 Vt = set.isometry(Branch::plus, s.z.x, s.z.p);
    Mat2 M = Vt.adjoint() * obs.value(s.z.x, s.z.p) * Vt;
    Mat2 rho = 0.5 * Mat2::Identity();
    for (int k = 0; k < 3; ++k) rho += 0.5 * n0[k] * pauli(k);
    double want = std::real((rho * s.D.adjoint() * M * s.D).trace());
    CHECK(std::abs(c - want) < 1e-10);
  }
}

TEST_CASE("identity observable evolves trivially on both sides") {
  auto set = magnetic_set();
  EgorovExperiment e;
  e.set = set;
  e.observable = identity_symbol();
  e.x0 = Vec3(2 * M_PI, 0, 0);
  e.p0 = Vec3(0.5, 0, 0);
  e.n0 = Vec3::UnitX();
  e.times = {0.0, 0.8, 1.6};
  e.hbars = {0.4};
  e.grids = magnetic_grid;
  EgorovResult r = egorov_compare(e);
  for (double c : r.c) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  for (double q : r.q[0]) CHECK(q == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("block-diagonality guard") {
  auto set = magnetic_set();
  EgorovExperiment e;
  e.set = set;
  e.observable = constant_symbol(dirac_alpha(0));  // couples the branches
  e.times = {0.0};
  e.hbars = {0.4};
  e.grids = magnetic_grid;
  CHECK_THROWS_AS(egorov_compare(e), BlockDiagonalityViolated);
}

TEST_CASE("spin observable error shrinks with hbar") {
  auto set = magnetic_set();
  double T = estimate_orbit_period(set, Branch::plus, PhasePoint{Vec3(2 * M_PI, 0, 0), Vec3(0.5, 0, 0)});

  EgorovExperiment e;
  e.set = set;
  e.observable = spin_block_observable(set, 2, false);
  e.x0 = Vec3(2 * M_PI, 0, 0);
  e.p0 = Vec3(0.5, 0, 0);
  e.n0 = Vec3::UnitX();
  e.times = {0.25 * T, 0.5 * T};
  e.hbars = {0.4, 0.2, 0.1};
  e.grids = magnetic_grid;
  EgorovResult r = egorov_compare(e);

  // quantization-only error at t = 0 tracks hbar and stays below the
  // transported error
  const auto& err = r.scaling.column("abs_err");
  CHECK(err.back() < err.front());
  CHECK(r.scaling.slopes[0] > 0.6);
  // the t = 0 discrepancy is pure quantization error: O(hbar), with a
  // constant that stays below the transported one
  for (size_t i = 0; i < r.hbars.size(); ++i) CHECK(r.err_t0[i] < 0.9 * err[i] + 1e-4);
  CHECK(loglog_slope(r.hbars, r.err_t0) > 0.8);

  // time reversal mirrors the error within a factor of two
  EgorovExperiment eb = e;
  eb.times = {-0.25 * T, -0.5 * T};
  eb.hbars = {0.2};
  EgorovResult rb = egorov_compare(eb);
  EgorovExperiment ef = e;
  ef.hbars = {0.2};
  EgorovResult rf = egorov_compare(ef);
  double fwd = std::abs(rf.q[0].back() - rf.c.back());
  double bwd = std::abs(rb.q[0].back() - rb.c.back());
  CHECK(bwd < 2.0 * fwd);
  CHECK(fwd < 2.0 * bwd);
}

TEST_CASE("evolved block-diagonal observables stay block diagonal") {
  auto set = build_model(preset_periodic_phi(0.3, Vec3::Constant(M_PI)), Constants{});
  auto grids = [](double hbar) {
    int n = static_cast<int>(std::lround(12.8 / hbar));
    int p2 = 1;
    while (p2 < n) p2 *= 2;
    return make_grid(1, p2, M_PI, hbar);
  };
  MatrixSymbol obs = spin_block_observable(set, 2, true);
  InvariantAlgebraResult r =
      invariant_algebra_probe(set, obs, 1, 0.8, {0.2, 0.1, 0.05}, grids);
  CHECK(r.slope > 1.7);
  for (size_t i = 0; i < r.hbars.size(); ++i) {
    CHECK(r.offdiag_initial[i] < 1e-11);           // exact sandwich at t = 0
    CHECK(r.offdiag_evolved[i] < 0.05);
  }
}

TEST_CASE("bare position stays off-diagonal and oscillates at the gap frequency") {
  auto set = build_model(preset_free(), Constants{});
  QuantumGrid g = make_grid(1, 512, 8 * M_PI, 0.1);
  BarePositionProbe pr = bare_position_probe(set, g, 1.0, 512);

  CHECK(std::abs(pr.peak_frequency - pr.expected_frequency) < 0.01 * pr.expected_frequency);
  CHECK(pr.norm_initial > 1e-3);
  CHECK(pr.norm_evolved == doctest::Approx(pr.norm_initial).epsilon(1e-6));
  // the interference signal is genuinely present
  double amp = 0.0;
  for (double v : pr.interference) amp = std::max(amp, std::abs(v));
  CHECK(amp > 1e-4);
}
