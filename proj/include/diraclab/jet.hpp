#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace diraclab {

using cplx = std::complex<double>;

using ExpoVec = std::array<uint8_t, 6>;

// Monomial index tables for truncated Taylor polynomials in up to six
// variables (the active phase-space coordinates). One table is shared by
// all jets of a given (nvars, degree); tables are built once and cached.
class JetTable {
public:
  static const JetTable& get(int nvars, int degree);
  static constexpr int max_degree = 8;

  int nvars = 0;
  int degree = 0;
  int size = 0;                          // number of monomials
  std::vector<ExpoVec> expo;             // exponents, graded order
  std::vector<int> deg_of;               // |alpha|
  std::vector<int> degree_end;           // end index of each degree block
  std::vector<int32_t> prod;             // size*size -> monomial index, -1 if truncated
  std::vector<int32_t> dvar;             // size*nvars -> index of alpha - e_v, -1 at zero exponent
  std::vector<double> fact;              // alpha!

  int index_of(const ExpoVec& a) const;  // -1 if beyond truncation

private:
  JetTable(int nvars_, int degree_);
};

// Truncated Taylor polynomial with complex coefficients. Coefficient c_alpha
// multiplies prod_j (x_j - x0_j)^alpha_j, so partial derivatives are
// alpha! * c_alpha. Small jets live inline, larger ones on the heap.
class Jet {
public:
  Jet() = default;
  explicit Jet(const JetTable& t);
  Jet(const JetTable& t, cplx value);
  static Jet variable(const JetTable& t, int var, double base_value);

  Jet(const Jet& o);
  Jet(Jet&& o) noexcept;
  Jet& operator=(const Jet& o);
  Jet& operator=(Jet&& o) noexcept;
  ~Jet() = default;

  bool valid() const { return tab_ != nullptr; }
  const JetTable& table() const { return *tab_; }
  int size() const { return n_; }

  cplx value() const { return d_[0]; }
  cplx& operator[](int i) { return d_[i]; }
  const cplx& operator[](int i) const { return d_[i]; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(cplx s) { d_[0] += s; return *this; }
  Jet& operator-=(cplx s) { d_[0] -= s; return *this; }
  Jet& operator*=(cplx s);
  Jet& operator*=(const Jet& o) { *this = *this * o; return *this; }

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cplx s) { a *= s; return a; }
  friend Jet operator*(cplx s, Jet a) { a *= s; return a; }
  friend Jet operator+(Jet a, cplx s) { a += s; return a; }
  friend Jet operator+(cplx s, Jet a) { a += s; return a; }
  friend Jet operator-(Jet a, cplx s) { a -= s; return a; }
  friend Jet operator-(cplx s, Jet a) { a *= cplx(-1.0); a += s; return a; }
  friend Jet operator-(Jet a) { a *= cplx(-1.0); return a; }

  // d/dx_v; the result is reliable one degree lower than this jet.
  Jet derivative(int var) const;
  Jet derivative(const ExpoVec& ax) const;
  // alpha! * coefficient
  cplx partial(const ExpoVec& ax) const;

  Jet conjugate() const;

private:
  static constexpr int inline_cap = 16;
  void alloc(const JetTable& t);

  const JetTable* tab_ = nullptr;
  int n_ = 0;
  cplx* d_ = nullptr;
  std::array<cplx, inline_cap> sbuf_;
  std::unique_ptr<cplx[]> hbuf_;
};

// Analytic functions of jets; the base point must lie in the usual domain.
Jet jet_sqrt(const Jet& a);
Jet jet_inv(const Jet& a);
Jet jet_exp(const Jet& a);
Jet jet_log(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);
Jet jet_tanh(const Jet& a);
// f given by its Taylor coefficients f^{(k)}(a0)/k!, k = 0..degree
Jet jet_compose(const Jet& a, const std::vector<cplx>& series);

}  // namespace diraclab
