#pragma once

#include "diraclab/classical.hpp"
#include "diraclab/projectors.hpp"

namespace diraclab {

struct EigenPair {
  double energy = 0.0;
  Eigen::VectorXcd vec;  // momentum representation, unit norm
};

struct SpectrumWindow {
  double E = 0.0;
  double omega = 1.0;  // window half width in units of hbar
  double lo() const { return E - hbar * omega; }
  double hi() const { return E + hbar * omega; }
  double hbar = 0.1;
};

// Eigenpairs of the grid Hamiltonian inside [E - hbar w, E + hbar w];
// degenerate clusters (gaps below 1e-9) never straddle the window edge, the
// straddling cluster size is reported as the assignment ambiguity.
struct WindowSpectrum {
  std::vector<EigenPair> pairs;
  long ambiguity = 0;        // states in clusters cut by the window edge
  double max_residual = 0.0; // |H psi - E psi| over the returned pairs
  SpectralDecomposition full;
};

WindowSpectrum diagonalize(const DiracGridHamiltonian& h, const SpectrumWindow& win,
                           long dense_threshold = 16384);

struct ProjectedEigenData {
  std::vector<double> energy;
  std::vector<double> norm_plus, norm_minus;        // |P^+- psi_n|
  std::vector<double> r_plus, r_minus;              // |[H,P] psi| / |P psi|
  std::vector<double> s_plus, s_minus;              // |[H P, P] psi| / |P psi|
  std::vector<Eigen::VectorXcd> phi_plus, phi_minus;  // normalized projections
  std::vector<bool> present_plus, present_minus;    // branch above the norm floor
  double norm_floor = 1e-8;
};

ProjectedEigenData project_eigens(const WindowSpectrum& spectrum, const GridProjector& p_plus,
                                  const GridProjector& p_minus,
                                  const Eigen::MatrixXcd& h_dense, double norm_floor = 1e-8);

// phase-space shell volumes by Monte-Carlo co-area integration over the
// reduced (active-axis) phase space
struct ShellVolumes {
  double vol_plus = 0.0, vol_minus = 0.0;
  double se_plus = 0.0, se_minus = 0.0;
};
ShellVolumes shell_volumes(const DiracSymbolSet& set, const QuantumGrid& g, double E,
                           long samples, uint64_t seed);

// deterministic quadrature of the same integral for one active axis
double shell_volume_quadrature(const DiracSymbolSet& set, const QuantumGrid& g, Branch b,
                               double E, int nx = 4096);

struct WindowCensus {
  double E = 0.0, omega = 0.0, hbar = 0.0, delta = 0.1;
  long count = 0;                 // N_{E,w}
  long count_plus = 0, count_minus = 0;   // eigenvalues of the compressed H P^+-
  double szego_plus = 0.0, szego_minus = 0.0;  // sums of |P psi_n|^2 in the window
  long n_delta_plus = 0, n_delta_minus = 0;
  long ambiguity = 0;
  ShellVolumes volumes;
  double predicted_count = 0.0;   // phase-space prediction for N_{E,w}
  double predicted_plus = 0.0, predicted_minus = 0.0;
  double fraction_bound_plus = 0.0;   // vol+/(vol+ + vol-) - delta
  double fraction_plus = 0.0;         // measured N_delta+ / N
};

WindowCensus window_census(const DiracSymbolSet& set, const QuantumGrid& g,
                           const WindowSpectrum& spectrum, const ProjectedEigenData& data,
                           const GridProjector& p_plus, const GridProjector& p_minus,
                           const Eigen::MatrixXcd& h_dense, double E, double omega, double delta,
                           long mc_samples, uint64_t seed);

// counts eigenvalues of the compression of H to the range of P inside the window
long compressed_count(const Eigen::MatrixXcd& h_dense, const GridProjector& p, double lo,
                      double hi);

// microcanonical x sphere average of a sphere observable by Monte Carlo
struct McAverage {
  double mean = 0.0;
  double se = 0.0;
  long accepted = 0;
};
McAverage microcanonical_average(const DiracSymbolSet& set, const QuantumGrid& g, Branch b,
                                 double E, const SphereObservable& obs, long samples,
                                 uint64_t seed);

struct QeDiagnostic {
  std::vector<double> energy;
  std::vector<double> expectation;   // <phi_n, B phi_n> over retained states
  double m_e = 0.0;                   // classical microcanonical average
  double m_e_se = 0.0;
  double mean_deviation = 0.0;
  double fraction_within = 0.0;       // |<B> - M_E| <= eps_fraction
  double eps_fraction = 0.1;
  // single-shell variant: expectations of P B P on raw eigenspinors
  bool single_shell = false;
  double other_branch_mean = 0.0;
};

// sphere symbol of the observable on the branch: b(x, p, n) with the
// quantizer convention of the sphere module
double sphere_symbol_value(const DiracSymbolSet& set, Branch b, const MatrixSymbol& obs,
                           const Vec3& x, const Vec3& p, const Vec3& n);

QeDiagnostic qe_diagnostic(const DiracSymbolSet& set, const QuantumGrid& g,
                           const WindowSpectrum& spectrum, const ProjectedEigenData& data,
                           const GridProjector& p_plus, const GridProjector& p_minus,
                           const MatrixSymbol& observable, Branch branch, double E, double delta,
                           long mc_samples, uint64_t seed);

}  // namespace diraclab
