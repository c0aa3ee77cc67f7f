#pragma once

#include "diraclab/fields.hpp"
#include "diraclab/symbol.hpp"

namespace diraclab {

enum class Branch { plus, minus };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
inline Branch other_branch(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }
inline const char* branch_name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

// The Dirac symbol, its eigenvalue pair, the eigenprojections onto the
// particle / anti-particle subspaces and the isometries to spin space.
struct DiracSymbolSet {
  FieldPreset preset;
  Constants cst;

  MatrixSymbol H;
  ScalarSymbol h_plus, h_minus;
  ScalarSymbol eps;         // order function, bounded below by m c^2
  double eps_lower_bound = 1.0;
  MatrixSymbol Pi0_plus, Pi0_minus;

  const MatrixSymbol& Pi0(Branch b) const { return b == Branch::plus ? Pi0_plus : Pi0_minus; }
  const ScalarSymbol& h(Branch b) const { return b == Branch::plus ? h_plus : h_minus; }

  JetMat42 isometry_jets(Branch b, const PhaseJets& s) const;
  Mat42 isometry(Branch b, const Vec3& x, const Vec3& p) const;

  // gap between the branch Hamiltonians at a point
  double gap(const Vec3& x, const Vec3& p) const;
};

// Builds the symbol set and verifies the gap condition on a deterministic
// sample of the preset's cell; throws GapViolation with the offending point.
DiracSymbolSet build_model(const FieldPreset& preset, const Constants& cst);

// Classical spin precession vector: the 2x2 transport generator is C.sigma/2.
Vec3 effective_spin_field(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p);

// 4x4 effective spin Hamiltonian assembled from first derivatives of the
// eigenprojection and the eigenvalue pair.
Mat4 effective_spin_hamiltonian(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p);

// Derivative of the isometry along the Hamiltonian flow, contracted back to
// spin space: i {h, V*} V. This is the gauge connection relating the 4x4
// transport generator to C.sigma/2.
Mat2 isometry_connection(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p);

}  // namespace diraclab
