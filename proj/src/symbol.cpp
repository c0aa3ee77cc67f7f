#include "diraclab/symbol.hpp"

#include <cmath>

namespace diraclab {

namespace {
const cplx I(0.0, 1.0);

Jet truncate_jet(const Jet& a, const JetTable& lower) {
  // graded enumeration makes lower tables a prefix of higher ones
  Jet r(lower);
  for (int i = 0; i < lower.size; ++i) r[i] = a[i];
  return r;
}

JetMat4 truncate_mat(const JetMat4& a, const JetTable& lower) {
  JetMat4 r(lower);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = truncate_jet(a(i, j), lower);
  return r;
}
}  // namespace

PhaseJets seed_phase(const Vec3& x, const Vec3& p, const JetContext& ctx) {
  if (ctx.dim < 1 || ctx.dim > 3) throw ConfigError("phase-space dim must be 1..3");
  const JetTable& t = JetTable::get(2 * ctx.dim, ctx.degree);
  PhaseJets s;
  s.dim = ctx.dim;
  s.tab = &t;
  s.x0 = x;
  s.p0 = p;
  for (int a = 0; a < 3; ++a) {
    if (a < ctx.dim) {
      s.x[a] = Jet::variable(t, a, x[a]);
      s.p[a] = Jet::variable(t, ctx.dim + a, p[a]);
    } else {
      s.x[a] = Jet(t, x[a]);
      s.p[a] = Jet(t, p[a]);
    }
  }
  return s;
}

ExpoVec to_expo(const PhaseMultiIndex& mi, int dim) {
  ExpoVec e{};
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      e[a] = static_cast<uint8_t>(mi.x[a]);
      e[dim + a] = static_cast<uint8_t>(mi.p[a]);
    } else if (mi.x[a] != 0 || mi.p[a] != 0) {
      throw InsufficientDerivativeOrder("derivative requested along a frozen axis");
    }
  }
  return e;
}

MatrixSymbol::MatrixSymbol(Fn fn, int max_order, bool hermitian)
    : impl_(std::make_shared<Impl>(Impl{std::move(fn), max_order, hermitian})) {}

int MatrixSymbol::max_order() const { return impl_->max_order; }
bool MatrixSymbol::hermitian() const { return impl_->hermitian; }

JetMat4 MatrixSymbol::jets(const PhaseJets& s) const {
  if (s.degree() > impl_->max_order)
    throw InsufficientDerivativeOrder("symbol cannot supply derivatives of order " +
                                      std::to_string(s.degree()));
  return impl_->fn(s);
}

JetMat4 MatrixSymbol::jets(const Vec3& x, const Vec3& p, const JetContext& ctx) const {
  return jets(seed_phase(x, p, ctx));
}

Mat4 MatrixSymbol::value(const Vec3& x, const Vec3& p, int dim) const {
  return jets(x, p, JetContext{dim, 0}).value();
}

Mat4 MatrixSymbol::derivative(const Vec3& x, const Vec3& p, const PhaseMultiIndex& mi,
                              int dim) const {
  ExpoVec e = to_expo(mi, dim);
  JetMat4 j = jets(x, p, JetContext{dim, mi.order()});
  return j.partial(e);
}

MatrixSymbol MatrixSymbol::adjoint() const {
  MatrixSymbol a = *this;
  return MatrixSymbol([a](const PhaseJets& s) { return a.jets(s).adjoint(); }, a.max_order(),
                      a.hermitian());
}

ScalarSymbol::ScalarSymbol(Fn fn, int max_order)
    : impl_(std::make_shared<Impl>(Impl{std::move(fn), max_order})) {}

int ScalarSymbol::max_order() const { return impl_->max_order; }

Jet ScalarSymbol::jet(const PhaseJets& s) const {
  if (s.degree() > impl_->max_order)
    throw InsufficientDerivativeOrder("scalar symbol cannot supply derivatives of order " +
                                      std::to_string(s.degree()));
  return impl_->fn(s);
}

cplx ScalarSymbol::value(const Vec3& x, const Vec3& p, int dim) const {
  return jet(seed_phase(x, p, JetContext{dim, 0})).value();
}

Vec3 ScalarSymbol::grad_x(const Vec3& x, const Vec3& p) const {
  Jet j = jet(seed_phase(x, p, JetContext{3, 1}));
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    ExpoVec e{};
    e[a] = 1;
    g[a] = std::real(j.partial(e));
  }
  return g;
}

Vec3 ScalarSymbol::grad_p(const Vec3& x, const Vec3& p) const {
  Jet j = jet(seed_phase(x, p, JetContext{3, 1}));
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    ExpoVec e{};
    e[3 + a] = 1;
    g[a] = std::real(j.partial(e));
  }
  return g;
}

MatrixSymbol ScalarSymbol::times_identity() const {
  ScalarSymbol s = *this;
  return MatrixSymbol(
      [s](const PhaseJets& ph) {
        Jet j = s.jet(ph);
        JetMat4 m(*ph.tab);
        for (int i = 0; i < 4; ++i) m(i, i) = j;
        return m;
      },
      s.max_order(), true);
}

MatrixSymbol constant_symbol(const Mat4& v) {
  bool herm = (v - v.adjoint()).norm() < 1e-14;
  return MatrixSymbol([v](const PhaseJets& s) { return JetMat4::constant(*s.tab, v); },
                      JetTable::max_degree, herm);
}

MatrixSymbol identity_symbol() { return constant_symbol(Mat4::Identity()); }

MatrixSymbol coordinate_symbol(int axis, bool momentum) {
  return MatrixSymbol(
      [axis, momentum](const PhaseJets& s) {
        const Jet& c = momentum ? s.p[axis] : s.x[axis];
        JetMat4 m(*s.tab);
        for (int i = 0; i < 4; ++i) m(i, i) = c;
        return m;
      },
      JetTable::max_degree, true);
}

MatrixSymbol sym_add(const MatrixSymbol& a, const MatrixSymbol& b) {
  return MatrixSymbol([a, b](const PhaseJets& s) { return a.jets(s) + b.jets(s); },
                      std::min(a.max_order(), b.max_order()), a.hermitian() && b.hermitian());
}

MatrixSymbol sym_sub(const MatrixSymbol& a, const MatrixSymbol& b) {
  return MatrixSymbol([a, b](const PhaseJets& s) { return a.jets(s) - b.jets(s); },
                      std::min(a.max_order(), b.max_order()), a.hermitian() && b.hermitian());
}

MatrixSymbol sym_scale(cplx s, const MatrixSymbol& a) {
  bool herm = a.hermitian() && std::imag(s) == 0.0;
  return MatrixSymbol([s, a](const PhaseJets& ph) { return a.jets(ph) * s; }, a.max_order(), herm);
}

MatrixSymbol sym_mul(const MatrixSymbol& a, const MatrixSymbol& b) {
  return MatrixSymbol([a, b](const PhaseJets& s) { return a.jets(s) * b.jets(s); },
                      std::min(a.max_order(), b.max_order()), false);
}

JetMat4 star_term_jets(const MatrixSymbol& a, const MatrixSymbol& b, int j, const PhaseJets& s) {
  if (j == 0) return a.jets(s) * b.jets(s);
  const int dim = s.dim;
  PhaseJets sh = seed_phase(s.x0, s.p0, JetContext{dim, s.degree() + j});
  JetMat4 aj = a.jets(sh);
  JetMat4 bj = b.jets(sh);

  // (i/2)^j sum over |mu|+|nu| = j of (-1)^|nu| / (mu! nu!)
  //   (d_x^mu d_p^nu a)(d_x^nu d_p^mu b)
  const JetTable& pairs = JetTable::get(2 * dim, j);
  JetMat4 acc(*sh.tab);
  cplx pref = std::pow(I * 0.5, j);
  for (int idx = 0; idx < pairs.size; ++idx) {
    if (pairs.deg_of[idx] != j) continue;
    const ExpoVec& c = pairs.expo[idx];
    ExpoVec ea{}, eb{};
    int abs_nu = 0;
    for (int v = 0; v < dim; ++v) {
      uint8_t mu = c[v], nu = c[dim + v];
      abs_nu += nu;
      ea[v] = mu;
      ea[dim + v] = nu;
      eb[v] = nu;
      eb[dim + v] = mu;
    }
    cplx coef = pref * ((abs_nu % 2) ? -1.0 : 1.0) / pairs.fact[idx];
    acc += (aj.derivative(ea) * bj.derivative(eb)) * coef;
  }
  return truncate_mat(acc, *s.tab);
}

MatrixSymbol star_term(const MatrixSymbol& a, const MatrixSymbol& b, int j) {
  int avail = std::min(a.max_order(), b.max_order()) - j;
  if (avail < 0)
    throw InsufficientDerivativeOrder("star term of order " + std::to_string(j) +
                                      " exceeds operand derivative budget");
  return MatrixSymbol([a, b, j](const PhaseJets& s) { return star_term_jets(a, b, j, s); }, avail,
                      false);
}

MatrixSymbol matrix_poisson_bracket(const MatrixSymbol& a, const MatrixSymbol& b) {
  int avail = std::min(a.max_order(), b.max_order()) - 1;
  if (avail < 0) throw InsufficientDerivativeOrder("poisson bracket needs first derivatives");
  return MatrixSymbol(
      [a, b](const PhaseJets& s) {
        PhaseJets sh = seed_phase(s.x0, s.p0, JetContext{s.dim, s.degree() + 1});
        JetMat4 aj = a.jets(sh), bj = b.jets(sh);
        JetMat4 acc(*sh.tab);
        for (int v = 0; v < s.dim; ++v) {
          ExpoVec ex{}, ep{};
          ex[v] = 1;
          ep[s.dim + v] = 1;
          acc += aj.derivative(ep) * bj.derivative(ex) - aj.derivative(ex) * bj.derivative(ep);
        }
        return truncate_mat(acc, *s.tab);
      },
      avail, false);
}

SymbolExpansion::SymbolExpansion(std::vector<MatrixSymbol> coeffs, int lowest_power)
    : coeffs_(std::move(coeffs)), lowest_(lowest_power) {}

Mat4 SymbolExpansion::evaluate(const Vec3& x, const Vec3& p, double hbar, int dim) const {
  Mat4 acc = Mat4::Zero();
  for (int k = 0; k < truncation_order(); ++k)
    acc += std::pow(hbar, lowest_ + k) * coeffs_[static_cast<size_t>(k)].value(x, p, dim);
  return acc;
}

SymbolExpansion SymbolExpansion::adjoint() const {
  std::vector<MatrixSymbol> c;
  c.reserve(coeffs_.size());
  for (const auto& s : coeffs_) c.push_back(s.adjoint());
  return SymbolExpansion(std::move(c), lowest_);
}

SymbolExpansion SymbolExpansion::from_symbol(const MatrixSymbol& a) {
  return SymbolExpansion({a}, 0);
}

SymbolExpansion star_product(const SymbolExpansion& a, const SymbolExpansion& b, int order) {
  const int lowest = a.lowest_power() + b.lowest_power();
  if (order < lowest) throw OrderUnavailable("star product truncated below its leading power");
  std::vector<MatrixSymbol> out;
  for (int n = lowest; n <= order; ++n) {
    std::vector<MatrixSymbol> terms;
    for (int k = a.lowest_power(); k <= a.highest_power(); ++k) {
      for (int l = b.lowest_power(); l <= b.highest_power(); ++l) {
        int j = n - k - l;
        if (j < 0) continue;
        terms.push_back(star_term(a.coeff_power(k), b.coeff_power(l), j));
      }
    }
    if (terms.empty()) {
      out.push_back(sym_scale(0.0, identity_symbol()));
    } else {
      MatrixSymbol acc = terms[0];
      for (size_t i = 1; i < terms.size(); ++i) acc = sym_add(acc, terms[i]);
      out.push_back(acc);
    }
  }
  return SymbolExpansion(std::move(out), lowest);
}

SymbolExpansion moyal_commutator(const SymbolExpansion& a, const SymbolExpansion& b, int order) {
  SymbolExpansion ab = star_product(a, b, order + 1);
  SymbolExpansion ba = star_product(b, a, order + 1);
  std::vector<MatrixSymbol> out;
  const int lowest = ab.lowest_power() - 1;
  for (int n = lowest; n <= order; ++n) {
    out.push_back(sym_scale(I, sym_sub(ab.coeff_power(n + 1), ba.coeff_power(n + 1))));
  }
  return SymbolExpansion(std::move(out), lowest);
}

}  // namespace diraclab
