#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diraclab/egorov.hpp"
#include "diraclab/spectral.hpp"

using namespace diraclab;

namespace {

struct CensusFixture {
  DiracSymbolSet set = build_model(preset_periodic_phi(0.3, Vec3::Constant(M_PI)), Constants{});
  QuantumGrid g = make_grid(1, 128, M_PI, 0.1);
  DiracGridHamiltonian h = DiracGridHamiltonian::build(set, g);
  Eigen::MatrixXcd hd = h.dense();
  WindowSpectrum spectrum = diagonalize(h, SpectrumWindow{1.5, 3.0, 0.1});
  GridProjector pp = quantize_and_riesz(set, correct_projector_symbol(set, Branch::plus, 1, 1), g);
  GridProjector pm = quantize_and_riesz(set, correct_projector_symbol(set, Branch::minus, 1, 1), g);
  ProjectedEigenData data = project_eigens(spectrum, pp, pm, hd);
};

CensusFixture& fixture() {
  static CensusFixture f;
  return f;
}

}  // namespace

TEST_CASE("free lattice spectrum is the closed-form dispersion") {
  auto set = build_model(preset_free(), Constants{});
  QuantumGrid g = make_grid(1, 64, M_PI, 0.2);
  auto h = DiracGridHamiltonian::build(set, g);
  WindowSpectrum w = diagonalize(h, SpectrumWindow{1.5, 4.0, 0.2});
  CHECK(w.max_residual < 1e-10);

  // every pair in the window matches a lattice energy, twice (spin)
  for (const EigenPair& ep : w.pairs) {
    double best = 1e300;
    for (int i = 0; i < 64; ++i) {
      double p = g.momentum(0, g.k_of(0, i));
      best = std::min(best, std::abs(std::sqrt(p * p + 1.0) - ep.energy));
    }
    CHECK(best < 1e-11);
  }
  // charge-conjugation symmetry of the full spectrum
  const Eigen::VectorXd& e = w.full.evals;
  for (long i = 0; i < e.size(); ++i)
    CHECK(std::abs(e[i] + e[e.size() - 1 - i]) < 1e-10);

  CHECK_THROWS_AS(diagonalize(h, SpectrumWindow{0.0, 1.0, 0.2}), WindowEmpty);
}

TEST_CASE("small potentials shift eigenvalues at second order") {
  QuantumGrid g = make_grid(1, 64, M_PI, 0.2);
  auto free_spec =
      SpectralDecomposition::compute(DiracGridHamiltonian::build(build_model(preset_free(), Constants{}), g));

  auto shift = [&](double phi0) {
    auto set = build_model(preset_periodic_phi(phi0, Vec3::Constant(M_PI)), Constants{});
    auto spec = SpectralDecomposition::compute(DiracGridHamiltonian::build(set, g));
    // the largest displacement over the central part of the spectrum
    double worst = 0.0;
    for (long i = 0; i < spec.evals.size(); ++i)
      worst = std::max(worst, std::abs(spec.evals[i] - free_spec.evals[i]));
    return worst;
  };
  double s1 = shift(0.02), s2 = shift(0.04);
  CHECK(s2 / s1 > 3.0);
  CHECK(s2 / s1 < 5.0);
  CHECK(s1 < 5e-4);  // absolute scale is quadratic, not linear
}

TEST_CASE("projected eigenspinors and quasimode residuals") {
  auto& f = fixture();
  CHECK(!f.data.energy.empty());

  for (size_t i = 0; i < f.data.energy.size(); ++i) {
    // the window sits inside the particle branch
    CHECK(f.data.present_plus[i]);
    CHECK(f.data.norm_plus[i] > 0.9);

    // quasimode property as an identity of the computation
    if (f.data.present_plus[i]) {
      Eigen::VectorXcd resid =
          f.hd * f.data.phi_plus[i] - f.data.energy[i] * f.data.phi_plus[i];
      CHECK(std::abs(resid.norm() - f.data.r_plus[i]) < 1e-9);
      CHECK(f.data.r_plus[i] < 1e-3);
      CHECK(f.data.s_plus[i] <= f.data.r_plus[i] + 1e-12);
    }
  }

  // free preset: each eigenspinor lies in exactly one branch
  auto fset = build_model(preset_free(), Constants{});
  QuantumGrid fg = make_grid(1, 32, M_PI, 0.4);
  auto fh = DiracGridHamiltonian::build(fset, fg);
  WindowSpectrum fw = diagonalize(fh, SpectrumWindow{2.0, 3.0, 0.4});
  GridProjector fpp =
      quantize_and_riesz(fset, correct_projector_symbol(fset, Branch::plus, 0, 1), fg);
  GridProjector fpm =
      quantize_and_riesz(fset, correct_projector_symbol(fset, Branch::minus, 0, 1), fg);
  ProjectedEigenData fd = project_eigens(fw, fpp, fpm, fh.dense());
  for (size_t i = 0; i < fd.energy.size(); ++i) {
    CHECK(fd.norm_plus[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fd.norm_minus[i] < 1e-10);
    CHECK(!fd.present_minus[i]);
    CHECK(fd.r_plus[i] < 1e-11);
  }
}

TEST_CASE("compression of the hamiltonian keeps an eigenvalue near each quasimode") {
  auto& f = fixture();
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  hermitian_eig(f.pp.matrix, evals, evecs);
  Eigen::MatrixXcd basis = evecs.rightCols(f.pp.rank);
  Eigen::MatrixXcd comp = basis.adjoint() * f.hd * basis;
  Eigen::VectorXd ce;
  Eigen::MatrixXcd cv;
  hermitian_eig(comp, ce, cv);

  for (size_t i = 0; i < f.data.energy.size(); ++i) {
    if (!f.data.present_plus[i]) continue;
    // in-range residual bounds the distance to the compressed spectrum
    Eigen::VectorXcd rv = f.pp.matrix * (f.hd * f.data.phi_plus[i]) -
                          f.data.energy[i] * f.data.phi_plus[i];
    double bound = rv.norm();
    double dist = 1e300;
    for (long j = 0; j < ce.size(); ++j) dist = std::min(dist, std::abs(ce[j] - f.data.energy[i]));
    CHECK(dist <= bound + 1e-12);
  }
}

TEST_CASE("trace identity over the full basis") {
  auto& f = fixture();
  double acc = 0.0;
  for (long i = 0; i < f.spectrum.full.evecs.cols(); ++i)
    acc += (f.pp.matrix * f.spectrum.full.evecs.col(i)).squaredNorm();
  CHECK(std::abs(acc - static_cast<double>(f.pp.rank)) < 1e-8);
}

TEST_CASE("shell volumes by sampling and quadrature") {
  auto& f = fixture();
  double quad = shell_volume_quadrature(f.set, f.g, Branch::plus, 1.5);
  ShellVolumes mc = shell_volumes(f.set, f.g, 1.5, 400000, 99);
  CHECK(mc.vol_minus == 0.0);
  CHECK(std::abs(mc.vol_plus - quad) < std::max(4.0 * mc.se_plus, 0.01 * quad));
  // no anti-particle shell anywhere between the branches
  CHECK(shell_volume_quadrature(f.set, f.g, Branch::minus, 1.5) == 0.0);
}

TEST_CASE("window census against the phase-space prediction") {
  auto& f = fixture();
  WindowCensus c = window_census(f.set, f.g, f.spectrum, f.data, f.pp, f.pm, f.hd, 1.5, 3.0, 0.1,
                                 400000, 4321);
  CHECK(c.count > 10);
  // inside the particle branch everything projects there
  CHECK(c.count_minus == 0);
  CHECK(c.szego_minus < 1e-6);
  CHECK(std::abs(c.szego_plus - static_cast<double>(c.count_plus)) <=
        static_cast<double>(c.ambiguity) + 0.05);
  CHECK(std::abs(static_cast<double>(c.count) - c.predicted_count) < 0.2 * c.predicted_count);
  CHECK(c.n_delta_plus == c.count);
  CHECK(c.fraction_plus >= c.fraction_bound_plus);
}

TEST_CASE("quantum ergodicity diagnostics") {
  auto& f = fixture();

  // identity observable: every expectation and the classical mean are one
  QeDiagnostic qi = qe_diagnostic(f.set, f.g, f.spectrum, f.data, f.pp, f.pm, identity_symbol(),
                                  Branch::plus, 1.5, 0.1, 30000, 7);
  for (double e : qi.expectation) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qi.m_e == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qi.mean_deviation < 1e-10);
  CHECK(qi.fraction_within == 1.0);
  // the anti-particle shell is empty here, so the single-shell variant runs
  CHECK(qi.single_shell);
  CHECK(std::abs(qi.other_branch_mean) < 2e-3);

  // odd-in-momentum observable: classical mean vanishes by symmetry
  MatrixSymbol vel(
      [set = f.set](const PhaseJets& s) {
        Jet v = s.p[0] * jet_inv(set.eps.jet(s));
        JetMat4 m(*s.tab);
        for (int i = 0; i < 4; ++i) m(i, i) = v;
        return m;
      },
      JetTable::max_degree, true);
  QeDiagnostic qo = qe_diagnostic(f.set, f.g, f.spectrum, f.data, f.pp, f.pm, vel, Branch::plus,
                                  1.5, 0.1, 60000, 8);
  CHECK(std::abs(qo.m_e) < 3.0 * qo.m_e_se);
}

TEST_CASE("sphere symbol of the spin observable") {
  auto& f = fixture();
  MatrixSymbol obs = spin_block_observable(f.set, 2, false);
  Vec3 x(0.3, 0, 0), p(0.8, 0, 0);
  // for the potential-only model the positive block of Sigma_3 is sigma_3 up
  // to the momentum rotation; at p along the first axis the n3 coefficient
  // survives
  double b_up = sphere_symbol_value(f.set, Branch::plus, obs, x, p, Vec3::UnitZ());
  double b_dn = sphere_symbol_value(f.set, Branch::plus, obs, x, p, -Vec3::UnitZ());
  CHECK(b_up > 0.0);
  CHECK(b_up == doctest::Approx(-b_dn).epsilon(1e-12));
}
