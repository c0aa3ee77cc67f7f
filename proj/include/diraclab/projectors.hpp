#pragma once

#include "diraclab/operators.hpp"

namespace diraclab {

// Order-by-order correction of the branch eigenprojection: the coefficients
// pi_0 .. pi_N make both star defects pi#pi - pi and H#pi - pi#H vanish
// through hbar^N. At each order the idempotency defect fixes the
// block-diagonal part algebraically and the commutation defect fixes the
// off-diagonal part after division by the branch gap.
struct AlmostProjectorSymbol {
  Branch branch = Branch::plus;
  int order = 0;  // highest corrected power N
  int dim = 3;    // active phase-space dimension of the Moyal structure
  SymbolExpansion expansion;
};

// jets of pi_0..pi_N at one point; ingredient evaluations are shared
std::vector<JetMat4> almost_projector_jets(const DiracSymbolSet& set, Branch branch, int order,
                                           const Vec3& x, const Vec3& p, const JetContext& ctx);

AlmostProjectorSymbol correct_projector_symbol(const DiracSymbolSet& set, Branch branch,
                                               int order, int dim = 3);

// Exactly idempotent hermitian projector obtained by spectral flattening of
// the quantized almost-projector (eigenvalues near one map to one, near zero
// to zero).
struct GridProjector {
  QuantumGrid grid;
  Branch branch = Branch::plus;
  int source_order = 0;
  Eigen::MatrixXcd matrix;  // momentum representation
  long rank = 0;
  double spectrum_lo = 0.0;      // extreme pre-flattening eigenvalues
  double spectrum_hi = 0.0;
  double cluster_distance = 0.0;  // closest pre-flattening eigenvalue to 1/2
};

// hbar-independent quantized coefficient matrices Q(pi_k) on one grid
struct ProjectorQuantization {
  QuantumGrid grid;
  Branch branch = Branch::plus;
  int max_order = 0;
  std::vector<Eigen::MatrixXcd> coeff;

  // sum of hbar^k Q(pi_k) through the requested order
  Eigen::MatrixXcd assemble(int order) const;
};

ProjectorQuantization quantize_projector_coefficients(const DiracSymbolSet& set, Branch branch,
                                                      int max_order, const QuantumGrid& g);

GridProjector riesz_flatten(const Eigen::MatrixXcd& almost, const QuantumGrid& g, Branch branch,
                            int order);
GridProjector quantize_and_riesz(const DiracSymbolSet& set, const AlmostProjectorSymbol& sym,
                                 const QuantumGrid& g);

// Measured scaling of one asymptotic claim over an hbar sweep.
struct ScalingReport {
  std::string claim;
  std::vector<double> hbar;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // [column][sweep index]
  std::vector<double> slopes;               // per column, log-log fit
  bool exact = false;                        // defects at the numerical floor

  const std::vector<double>& column(const std::string& name) const;
  double slope_of(const std::string& name) const;
};

using GridFactory = std::function<QuantumGrid(double hbar)>;

// Defects |Pi^2 - Pi| and |[H, Pi]| / |H| on the Nyquist-interior block per
// hbar, plus the complementarity defect |Pi_+ + Pi_- - 1|.
ScalingReport defect_report(const DiracSymbolSet& set, Branch branch, int order,
                            const std::vector<double>& hbars, const GridFactory& grids);

// |P - P_E| against the spectral projectors of the grid Hamiltonian above
// and below an energy E inside the gap.
double spectral_projector_distance(const GridProjector& p, const SpectralDecomposition& spec,
                                   double E);
ScalingReport spectral_distance_report(const DiracSymbolSet& set, Branch branch, int order,
                                       double E, const std::vector<double>& hbars,
                                       const GridFactory& grids);

}  // namespace diraclab
