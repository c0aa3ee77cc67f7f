#pragma once

#include "diraclab/classical.hpp"
#include "diraclab/projectors.hpp"
#include "diraclab/sphere.hpp"
#include "diraclab/wigner.hpp"

namespace diraclab {

// Comparison of the quantum Heisenberg evolution of a block-diagonal
// observable in a coherent state against the classical skew-product
// transport of its sphere symbol.
struct EgorovExperiment {
  DiracSymbolSet set;
  Branch branch = Branch::plus;
  MatrixSymbol observable;  // hbar-independent leading symbol, block-diagonal
  Vec3 x0 = Vec3::Zero();
  Vec3 p0 = Vec3::Zero();
  Vec3 n0 = Vec3::UnitX();
  std::vector<double> times;
  std::vector<double> hbars;
  GridFactory grids;
  double flow_tol = 1e-11;
  double width_scale = 1.0;
  bool require_block_diagonal = true;
};

struct EgorovResult {
  std::vector<double> hbars;
  std::vector<double> times;
  std::vector<std::vector<double>> q;  // [hbar index][time index]
  std::vector<double> c;               // classical values, hbar independent
  ScalingReport scaling;               // |q - c| at the final probe time
  std::vector<double> err_t0;          // quantization-only error at t = 0
};

// classical value via the sphere calculus: the skew transport of the sphere
// symbol paired with the sphere lift of the initial spin state (exactly the
// transported matrix block in the coherent spin state)
double egorov_classical_value(const DiracSymbolSet& set, Branch branch,
                              const MatrixSymbol& observable, const Vec3& x0, const Vec3& p0,
                              const Vec3& n0, double t, double tol);

EgorovResult egorov_compare(const EgorovExperiment& exp);

// off-diagonal norm of an evolved observable with respect to the corrected
// grid projectors
struct InvariantAlgebraResult {
  std::vector<double> hbars;
  std::vector<double> offdiag_initial;  // after the exact block-diagonal sandwich
  std::vector<double> offdiag_evolved;  // at the probe time
  double slope = 0.0;
  int order = 0;
};

InvariantAlgebraResult invariant_algebra_probe(const DiracSymbolSet& set,
                                               const MatrixSymbol& observable, int order,
                                               double t, const std::vector<double>& hbars,
                                               const GridFactory& grids);

// free-preset control: the bare position operator is off-diagonal at order
// hbar and stays so, its expectation oscillating at the pair-creation
// frequency 2 eps / hbar
struct BarePositionProbe {
  std::vector<double> times;
  std::vector<double> interference;  // <P+ x(t) P- + P- x(t) P+>
  double norm_initial = 0.0;
  double norm_evolved = 0.0;   // at the final time
  double peak_frequency = 0.0;
  double expected_frequency = 0.0;
};

BarePositionProbe bare_position_probe(const DiracSymbolSet& free_set, const QuantumGrid& g,
                                      double packet_momentum, int nsteps);

// spin observable sandwiched into the branch blocks: Pi0 Sigma_axis Pi0 on
// the positive branch, optionally plus the negative-branch block
MatrixSymbol spin_block_observable(const DiracSymbolSet& set, int axis, bool both_branches);

}  // namespace diraclab
