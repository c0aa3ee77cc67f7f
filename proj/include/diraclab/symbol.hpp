#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "diraclab/algebra.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

// Active phase-space structure: the first `dim` axes of x and p carry jet
// variables, the remaining axes are frozen parameters. Poisson brackets and
// star products act on the active axes only.
struct JetContext {
  int dim = 3;
  int degree = 0;
};

struct PhaseJets {
  int dim = 3;
  const JetTable* tab = nullptr;
  Vec3 x0, p0;
  std::array<Jet, 3> x, p;

  int degree() const { return tab->degree; }
};

PhaseJets seed_phase(const Vec3& x, const Vec3& p, const JetContext& ctx);

// Multi-index over the three x axes and three p axes; inactive entries must
// stay zero.
struct PhaseMultiIndex {
  std::array<int, 3> x{0, 0, 0};
  std::array<int, 3> p{0, 0, 0};
  int order() const { return x[0] + x[1] + x[2] + p[0] + p[1] + p[2]; }
};

ExpoVec to_expo(const PhaseMultiIndex& mi, int dim);

// A smooth map from phase space to 4x4 complex matrices together with exact
// derivative oracles supplied by jet evaluation.
class MatrixSymbol {
public:
  using Fn = std::function<JetMat4(const PhaseJets&)>;

  MatrixSymbol() = default;
  MatrixSymbol(Fn fn, int max_order, bool hermitian);

  bool valid() const { return impl_ != nullptr; }
  int max_order() const;
  bool hermitian() const;

  JetMat4 jets(const PhaseJets& s) const;
  JetMat4 jets(const Vec3& x, const Vec3& p, const JetContext& ctx) const;
  Mat4 value(const Vec3& x, const Vec3& p, int dim = 3) const;
  Mat4 derivative(const Vec3& x, const Vec3& p, const PhaseMultiIndex& mi, int dim = 3) const;

  MatrixSymbol adjoint() const;

private:
  struct Impl {
    Fn fn;
    int max_order;
    bool hermitian;
  };
  std::shared_ptr<const Impl> impl_;
};

// Scalar companion (multiples of the identity when used as a matrix symbol).
class ScalarSymbol {
public:
  using Fn = std::function<Jet(const PhaseJets&)>;

  ScalarSymbol() = default;
  ScalarSymbol(Fn fn, int max_order);

  bool valid() const { return impl_ != nullptr; }
  int max_order() const;

  Jet jet(const PhaseJets& s) const;
  cplx value(const Vec3& x, const Vec3& p, int dim = 3) const;
  Vec3 grad_x(const Vec3& x, const Vec3& p) const;
  Vec3 grad_p(const Vec3& x, const Vec3& p) const;

  MatrixSymbol times_identity() const;

private:
  struct Impl {
    Fn fn;
    int max_order;
  };
  std::shared_ptr<const Impl> impl_;
};

// Elementary symbols
MatrixSymbol constant_symbol(const Mat4& v);
MatrixSymbol identity_symbol();
MatrixSymbol coordinate_symbol(int axis, bool momentum);  // x_axis or p_axis times 1_4

MatrixSymbol sym_add(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol sym_sub(const MatrixSymbol& a, const MatrixSymbol& b);
MatrixSymbol sym_scale(cplx s, const MatrixSymbol& a);
MatrixSymbol sym_mul(const MatrixSymbol& a, const MatrixSymbol& b);  // pointwise product

// j-th Moyal bidifferential term; j = 0 is the pointwise product and the
// coefficient of hbar^j in the product expansion is star_term(a, b, j).
MatrixSymbol star_term(const MatrixSymbol& a, const MatrixSymbol& b, int j);
JetMat4 star_term_jets(const MatrixSymbol& a, const MatrixSymbol& b, int j, const PhaseJets& s);

// {A,B} = grad_p A . grad_x B - grad_x A . grad_p B, matrix order preserved.
MatrixSymbol matrix_poisson_bracket(const MatrixSymbol& a, const MatrixSymbol& b);

// Finite expansion sum_k hbar^(lowest+k) coeff[k].
class SymbolExpansion {
public:
  SymbolExpansion() = default;
  explicit SymbolExpansion(std::vector<MatrixSymbol> coeffs, int lowest_power = 0);

  int truncation_order() const { return static_cast<int>(coeffs_.size()); }
  int lowest_power() const { return lowest_; }
  int highest_power() const { return lowest_ + truncation_order() - 1; }
  bool has_power(int k) const { return k >= lowest_ && k <= highest_power(); }
  const MatrixSymbol& coeff_power(int k) const { return coeffs_.at(static_cast<size_t>(k - lowest_)); }
  const std::vector<MatrixSymbol>& coeffs() const { return coeffs_; }

  Mat4 evaluate(const Vec3& x, const Vec3& p, double hbar, int dim = 3) const;
  SymbolExpansion adjoint() const;

  static SymbolExpansion from_symbol(const MatrixSymbol& a);

private:
  std::vector<MatrixSymbol> coeffs_;
  int lowest_ = 0;
};

// Truncated Moyal product; coefficients are retained through hbar^order.
SymbolExpansion star_product(const SymbolExpansion& a, const SymbolExpansion& b, int order);
// (i/hbar)(a#b - b#a) through hbar^order; the result starts one power below
// the product of the leading terms, so commuting leading symbols give a
// vanishing leading coefficient.
SymbolExpansion moyal_commutator(const SymbolExpansion& a, const SymbolExpansion& b, int order);

}  // namespace diraclab
