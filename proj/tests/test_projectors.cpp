#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diraclab/projectors.hpp"

using namespace diraclab;

namespace {

std::mt19937_64 rng(5150123u);

Vec3 rand_vec(double s = 1.0) {
  std::uniform_real_distribution<double> u(-s, s);
  return Vec3(u(rng), u(rng), u(rng));
}

DiracSymbolSet phi_set(double phi0 = 0.3) {
  return build_model(preset_periodic_phi(phi0, Vec3::Constant(M_PI)), Constants{});
}

DiracSymbolSet em_set() {
  return build_model(preset_periodic_em(0.25, 0.15, Vec3::Constant(M_PI)), Constants{});
}

QuantumGrid sweep_grid(double hbar) {
  // fixed p_max = 12.8 across the sweep
  int n = static_cast<int>(std::lround(12.8 / hbar));
  int pow2 = 1;
  while (pow2 < n) pow2 *= 2;
  return make_grid(1, pow2, M_PI, hbar);
}

}  // namespace

TEST_CASE("free projection needs no corrections") {
  auto set = build_model(preset_free(), Constants{});
  for (int dim : {1, 3}) {
    auto jets = almost_projector_jets(set, Branch::plus, 3, rand_vec(2.0), rand_vec(1.5),
                                      JetContext{dim, 0});
    for (int k = 1; k <= 3; ++k) CHECK(jets[static_cast<size_t>(k)].value().norm() < 1e-13);
  }
}

TEST_CASE("correction coefficients are hermitian and complementary") {
  auto set = em_set();
  for (int t = 0; t < 4; ++t) {
    Vec3 x = rand_vec(2.0), p = rand_vec(1.5);
    auto plus = almost_projector_jets(set, Branch::plus, 2, x, p, JetContext{1, 0});
    auto minus = almost_projector_jets(set, Branch::minus, 2, x, p, JetContext{1, 0});
    for (int k = 0; k <= 2; ++k) {
      Mat4 a = plus[static_cast<size_t>(k)].value();
      Mat4 b = minus[static_cast<size_t>(k)].value();
      CHECK((a - a.adjoint()).norm() < 1e-12);
      Mat4 sum = a + b;
      if (k == 0) sum -= Mat4::Identity();
      CHECK(sum.norm() < 1e-12);
    }
  }
}

TEST_CASE("star defects vanish through the corrected order") {
  auto set = em_set();
  const int dim = 1;

  AlmostProjectorSymbol p0 = correct_projector_symbol(set, Branch::plus, 0, dim);
  AlmostProjectorSymbol p1 = correct_projector_symbol(set, Branch::plus, 1, dim);
  SymbolExpansion h = SymbolExpansion::from_symbol(set.H);

  for (int t = 0; t < 3; ++t) {
    Vec3 x = rand_vec(1.5), p = rand_vec(1.2);
    x[1] = x[2] = p[1] = p[2] = 0.0;

    // order zero: the uncorrected projection fails idempotency at hbar^1
    SymbolExpansion d0 = star_product(p0.expansion, p0.expansion, 1);
    Mat4 lead0 = d0.coeff_power(0).value(x, p, dim) - p0.expansion.coeff_power(0).value(x, p, dim);
    CHECK(lead0.norm() < 1e-12);
    CHECK(d0.coeff_power(1).value(x, p, dim).norm() > 1e-4);

    // order one: both defects vanish at hbar^1
    SymbolExpansion d1 = star_product(p1.expansion, p1.expansion, 1);
    Mat4 idem0 = d1.coeff_power(0).value(x, p, dim) - p1.expansion.coeff_power(0).value(x, p, dim);
    Mat4 idem1 = d1.coeff_power(1).value(x, p, dim) - p1.expansion.coeff_power(1).value(x, p, dim);
    CHECK(idem0.norm() < 1e-12);
    CHECK(idem1.norm() < 1e-10);

    SymbolExpansion hc = star_product(h, p1.expansion, 1);
    SymbolExpansion ch = star_product(p1.expansion, h, 1);
    CHECK((hc.coeff_power(0).value(x, p, dim) - ch.coeff_power(0).value(x, p, dim)).norm() < 1e-12);
    CHECK((hc.coeff_power(1).value(x, p, dim) - ch.coeff_power(1).value(x, p, dim)).norm() < 1e-10);
  }
}

TEST_CASE("free preset quantizes to the exact spectral projectors") {
  auto set = build_model(preset_free(), Constants{});
  QuantumGrid g = make_grid(1, 64, M_PI, 0.2);
  AlmostProjectorSymbol sym = correct_projector_symbol(set, Branch::plus, 1, 1);
  GridProjector p = quantize_and_riesz(set, sym, g);

  auto h = DiracGridHamiltonian::build(set, g);
  GridOperator proj = free_branch_projector(h, Branch::plus);
  CHECK((p.matrix - *proj.dense_matrix()).norm() < 1e-12);
  CHECK(p.rank == 2 * g.points());

  GridProjector pm = quantize_and_riesz(set, correct_projector_symbol(set, Branch::minus, 1, 1), g);
  CHECK(p.rank + pm.rank == g.hilbert_dim());
}

TEST_CASE("grid projector structure on an interacting preset") {
  auto set = em_set();
  QuantumGrid g = sweep_grid(0.2);
  AlmostProjectorSymbol sym = correct_projector_symbol(set, Branch::plus, 1, 1);
  GridProjector p = quantize_and_riesz(set, sym, g);

  CHECK((p.matrix - p.matrix.adjoint()).norm() < 1e-12);
  CHECK((p.matrix * p.matrix - p.matrix).norm() < 1e-11);
  // pre-flattening spectrum stays in the clusters around zero and one
  CHECK(p.spectrum_lo > -0.25);
  CHECK(p.spectrum_hi < 1.25);
  CHECK(p.cluster_distance > 0.25);

  GridProjector pm = quantize_and_riesz(set, correct_projector_symbol(set, Branch::minus, 1, 1), g);
  CHECK(p.rank + pm.rank == g.hilbert_dim());
}

TEST_CASE("riesz flattening rejects unresolved spectra") {
  QuantumGrid g = make_grid(1, 4, M_PI, 6.4);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(16, 16);
  bad.diagonal().setConstant(0.5);
  CHECK_THROWS_AS(riesz_flatten(bad, g, Branch::plus, 0), ClusterOverlap);
}

TEST_CASE("defect scaling over an hbar sweep") {
  auto set = em_set();
  std::vector<double> hbars = {0.2, 0.1, 0.05};

  ScalingReport r0 = defect_report(set, Branch::plus, 0, hbars, sweep_grid);
  CHECK(r0.slope_of("defect_idem") > 0.7);
  CHECK(r0.slope_of("defect_comm") > 0.7);
  // the uncorrected defect is visibly order hbar, not better
  CHECK(r0.slope_of("defect_idem") < 1.5);

  ScalingReport r1 = defect_report(set, Branch::plus, 1, hbars, sweep_grid);
  CHECK(r1.slope_of("defect_idem") > 1.6);
  CHECK(r1.slope_of("defect_comm") > 1.6);

  // complementarity is exact by the symmetry of the construction
  for (double v : r1.column("defect_complement")) CHECK(v < 1e-11);

  // defects shrink when the order rises
  CHECK(r1.column("defect_idem").back() < 0.2 * r0.column("defect_idem").back());

  // with a scalar potential alone the projection symbol is x-independent and
  // the uncorrected idempotency defect sits at the floor already
  ScalingReport rphi = defect_report(phi_set(), Branch::plus, 0, hbars, sweep_grid);
  for (double v : rphi.column("defect_idem")) CHECK(v < 1e-12);
  CHECK(rphi.slope_of("defect_comm") > 0.7);

  // the free preset sits entirely at the numerical floor
  auto fset = build_model(preset_free(), Constants{});
  ScalingReport rf = defect_report(fset, Branch::plus, 1, hbars, sweep_grid);
  CHECK(rf.exact);
}

TEST_CASE("distance to the spectral projectors") {
  auto set = phi_set();
  QuantumGrid g = sweep_grid(0.2);
  AlmostProjectorSymbol sym = correct_projector_symbol(set, Branch::plus, 1, 1);
  GridProjector p = quantize_and_riesz(set, sym, g);
  SpectralDecomposition spec = SpectralDecomposition::compute(DiracGridHamiltonian::build(set, g));

  double d0 = spectral_projector_distance(p, spec, 0.0);
  CHECK(d0 < 0.05);
  // invariant under moving E within the same gap component
  double d1 = spectral_projector_distance(p, spec, 0.3);
  CHECK(std::abs(d0 - d1) < 1e-9);

  // free preset: the distance collapses to the floor
  auto fset = build_model(preset_free(), Constants{});
  QuantumGrid fg = make_grid(1, 64, M_PI, 0.2);
  GridProjector fp = quantize_and_riesz(fset, correct_projector_symbol(fset, Branch::plus, 0, 1), fg);
  SpectralDecomposition fs = SpectralDecomposition::compute(DiracGridHamiltonian::build(fset, fg));
  CHECK(spectral_projector_distance(fp, fs, 0.0) < 1e-12);

  CHECK_THROWS_AS(spectral_projector_distance(fp, fs, fs.evals[10]), EInSpectrum);
}
