#pragma once

#include <memory>
#include <string>

#include "diraclab/grid.hpp"
#include "diraclab/linalg.hpp"
#include "diraclab/symbol.hpp"

namespace diraclab {

// Linear operator on the spinor grid space. Structure-aware kinds keep the
// exact paths exact (momentum multipliers, position multiplications); general
// symbols live as dense momentum-representation matrices.
class GridOperator {
public:
  enum class Kind { multiplier, x_mult, dense };

  static GridOperator multiplier(const QuantumGrid& g, std::vector<Mat4> blocks, bool hermitian);
  static GridOperator x_multiplication(const QuantumGrid& g, std::vector<Mat4> blocks,
                                       bool hermitian);
  static GridOperator dense(const QuantumGrid& g, Eigen::MatrixXcd k_matrix, bool hermitian);

  const QuantumGrid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  bool hermitian() const { return hermitian_; }

  // preserves the representation of the input field
  SpinorField apply(const SpinorField& psi) const;
  // momentum-representation dense matrix (assembled once, then shared)
  std::shared_ptr<const Eigen::MatrixXcd> dense_matrix() const;

  cplx expectation(const SpinorField& psi) const;

private:
  QuantumGrid grid_;
  Kind kind_ = Kind::dense;
  bool hermitian_ = false;
  std::vector<Mat4> blocks_;
  mutable std::shared_ptr<Eigen::MatrixXcd> dense_;
};

// Batch dense quantization: one tabulation pass over the half-step momentum
// lattice builds several operators (used for the coefficients of projector
// expansions, which share their evaluation).
using BatchSymbolEval = std::function<void(const Vec3& x, const Vec3& p, std::vector<Mat4>& out)>;
std::vector<Eigen::MatrixXcd> quantize_dense_batch(const QuantumGrid& g, int ncoeff,
                                                   const BatchSymbolEval& eval, bool hermitian);

// Midpoint-rule quantization of a matrix symbol, assembled in momentum space:
// the (k', k) block samples the x-Fourier coefficient nu = k' - k of the
// symbol at the averaged momentum (p_k' + p_k)/2. Dense work is limited to
// one- and two-dimensional grids.
GridOperator weyl_quantize(const MatrixSymbol& sym, const QuantumGrid& g);

// momentum-representation position operator (multiplication by the sawtooth
// coordinate in position space)
Eigen::MatrixXcd position_matrix(const QuantumGrid& g, int axis);

// 0/1 momentum mask that drops `margin` modes at each end of every active
// axis. Operator norms measured under this mask probe the Nyquist-interior
// block, whose entries are free of the torus wrap-around artifacts.
Eigen::VectorXd bulk_mask(const QuantumGrid& g, int margin);
int default_bulk_margin(const QuantumGrid& g);

double masked_operator_norm(const Eigen::MatrixXcd& op, const Eigen::VectorXd& mask,
                            uint64_t seed = 2024);

// Dirac Hamiltonian on the grid: exact splitting into a momentum multiplier
// T(p) = c alpha.p + beta m c^2 and a position multiplication
// V(x) = e phi(x) - e alpha.A(x).
struct DiracGridHamiltonian {
  QuantumGrid grid;
  DiracSymbolSet set;
  std::vector<Mat4> T;       // per momentum node
  std::vector<Mat4> V;       // per position node
  bool free_preset = false;  // V identically zero

  static DiracGridHamiltonian build(const DiracSymbolSet& set, const QuantumGrid& g);

  SpinorField apply(const SpinorField& psi) const;
  GridOperator as_operator() const;
  Eigen::MatrixXcd dense() const;

  SpinorField propagate_exact_free(const SpinorField& psi, double t) const;
  SpinorField strang_step(const SpinorField& psi, double dt, int nsteps) const;
  SpinorField propagate_split(const SpinorField& psi, double t, double tol) const;
  SpinorField propagate_krylov(const SpinorField& psi, double t, double tol) const;
};

enum class PropagationMethod { exact_free, split, krylov };

SpinorField propagate(const DiracGridHamiltonian& h, const SpinorField& psi, double t,
                      PropagationMethod method, double tol = 1e-10);

// Dense eigendecomposition of a hermitian grid operator; provides exact
// propagation and spectral projectors at desk scale.
struct SpectralDecomposition {
  QuantumGrid grid;
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;  // momentum representation

  static SpectralDecomposition compute(const DiracGridHamiltonian& h);
  static SpectralDecomposition compute(const Eigen::MatrixXcd& m, const QuantumGrid& g);

  SpinorField evolve(const SpinorField& psi, double t, double hbar) const;
  Eigen::MatrixXcd projector_above(double E) const;
  Eigen::MatrixXcd evolve_matrix(const Eigen::MatrixXcd& b, double t, double hbar) const;
};

// exact free spectral projector onto the branch subspace
GridOperator free_branch_projector(const DiracGridHamiltonian& h, Branch b);

// P x_axis P with the free branch projectors
Eigen::MatrixXcd projected_position_matrix(const DiracGridHamiltonian& h, Branch b, int axis);

struct ZitterTrace {
  std::vector<double> t;
  std::vector<Vec3> direct;       // <x>(t) on the active axes
  std::vector<Vec3> closed_form;  // initial + drift + interference term
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
};

// Free-motion position expectation compared against the closed-form
// momentum-space evaluation; throws NotFreePreset on interacting models.
ZitterTrace zitterbewegung_trace(const DiracGridHamiltonian& h, const SpinorField& psi0,
                                 const std::vector<double>& times);

// interference block P+ x P- + P- x P+ equals (i hbar/2) H^-1 F with
// F = c alpha - c^2 p H^-1 (free preset); returns the residual on a state
double interference_identity_residual(const DiracGridHamiltonian& h, const SpinorField& psi,
                                      int axis);

// expectation series of a fixed operator under free Heisenberg evolution
std::vector<double> heisenberg_series(const DiracGridHamiltonian& h,
                                      const std::function<SpinorField(const SpinorField&)>& op,
                                      const SpinorField& psi0, const std::vector<double>& times);

}  // namespace diraclab
