#include "diraclab/jet.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace diraclab {

namespace {

void enumerate_monomials(int nvars, int degree, std::vector<ExpoVec>& out) {
  // graded order: all monomials of degree 0, then 1, ...
  ExpoVec cur{};
  for (int d = 0; d <= degree; ++d) {
    // enumerate compositions of d into nvars parts, lexicographic
    std::vector<int> stack(nvars, 0);
    // recursive lambda
    auto rec = [&](auto&& self, int var, int rem) -> void {
      if (var == nvars - 1) {
        cur.fill(0);
        for (int v = 0; v + 1 < nvars; ++v) cur[v] = static_cast<uint8_t>(stack[v]);
        cur[nvars - 1] = static_cast<uint8_t>(rem);
        out.push_back(cur);
        return;
      }
      for (int k = rem; k >= 0; --k) {
        stack[var] = k;
        self(self, var + 1, rem - k);
      }
    };
    if (nvars == 1) {
      cur.fill(0);
      cur[0] = static_cast<uint8_t>(d);
      out.push_back(cur);
    } else {
      rec(rec, 0, d);
    }
  }
}

uint64_t pack_expo(const ExpoVec& e) {
  uint64_t k = 0;
  for (int i = 0; i < 6; ++i) k = (k << 8) | e[i];
  return k;
}

}  // namespace

JetTable::JetTable(int nvars_, int degree_) : nvars(nvars_), degree(degree_) {
  enumerate_monomials(nvars, degree, expo);
  size = static_cast<int>(expo.size());
  deg_of.resize(size);
  fact.resize(size);
  degree_end.assign(degree + 1, 0);
  std::map<uint64_t, int> lut;
  for (int i = 0; i < size; ++i) {
    int d = 0;
    double f = 1.0;
    for (int v = 0; v < nvars; ++v) {
      d += expo[i][v];
      for (int k = 2; k <= expo[i][v]; ++k) f *= k;
    }
    deg_of[i] = d;
    fact[i] = f;
    degree_end[d] = i + 1;
    lut[pack_expo(expo[i])] = i;
  }
  for (int d = 1; d <= degree; ++d)
    if (degree_end[d] == 0) degree_end[d] = degree_end[d - 1];

  prod.assign(static_cast<size_t>(size) * size, -1);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      if (deg_of[i] + deg_of[j] > degree) continue;
      ExpoVec s{};
      for (int v = 0; v < 6; ++v) s[v] = static_cast<uint8_t>(expo[i][v] + expo[j][v]);
      prod[static_cast<size_t>(i) * size + j] = lut.at(pack_expo(s));
    }
  }
  dvar.assign(static_cast<size_t>(size) * nvars, -1);
  for (int i = 0; i < size; ++i) {
    for (int v = 0; v < nvars; ++v) {
      if (expo[i][v] == 0) continue;
      ExpoVec s = expo[i];
      s[v] -= 1;
      dvar[static_cast<size_t>(i) * nvars + v] = lut.at(pack_expo(s));
    }
  }
}

int JetTable::index_of(const ExpoVec& a) const {
  int d = 0;
  for (int v = 0; v < nvars; ++v) d += a[v];
  if (d > degree) return -1;
  // linear scan within the degree block; tables are small and this is cold
  int begin = (d == 0) ? 0 : degree_end[d - 1];
  for (int i = begin; i < degree_end[d]; ++i)
    if (expo[i] == a) return i;
  return -1;
}

const JetTable& JetTable::get(int nvars, int degree) {
  if (nvars < 1 || nvars > 6) throw std::invalid_argument("JetTable: nvars out of range");
  if (degree < 0 || degree > max_degree) throw std::invalid_argument("JetTable: degree out of range");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::unique_ptr<JetTable>(new JetTable(nvars, degree))).first;
  return *it->second;
}

void Jet::alloc(const JetTable& t) {
  tab_ = &t;
  n_ = t.size;
  if (n_ <= inline_cap) {
    d_ = sbuf_.data();
  } else {
    hbuf_.reset(new cplx[n_]);
    d_ = hbuf_.get();
  }
}

Jet::Jet(const JetTable& t) {
  alloc(t);
  std::memset(static_cast<void*>(d_), 0, sizeof(cplx) * n_);
}

Jet::Jet(const JetTable& t, cplx value) : Jet(t) { d_[0] = value; }

Jet Jet::variable(const JetTable& t, int var, double base_value) {
  Jet j(t);
  j.d_[0] = base_value;
  if (t.degree >= 1) j.d_[1 + var] = 1.0;  // degree-1 block follows the constant
  return j;
}

Jet::Jet(const Jet& o) {
  if (!o.tab_) return;
  alloc(*o.tab_);
  std::memcpy(static_cast<void*>(d_), o.d_, sizeof(cplx) * n_);
}

Jet::Jet(Jet&& o) noexcept {
  tab_ = o.tab_;
  n_ = o.n_;
  if (!tab_) return;
  if (o.d_ == o.sbuf_.data()) {
    sbuf_ = o.sbuf_;
    d_ = sbuf_.data();
  } else {
    hbuf_ = std::move(o.hbuf_);
    d_ = hbuf_.get();
  }
  o.tab_ = nullptr;
  o.d_ = nullptr;
  o.n_ = 0;
}

Jet& Jet::operator=(const Jet& o) {
  if (this == &o) return *this;
  if (!o.tab_) {
    tab_ = nullptr;
    d_ = nullptr;
    n_ = 0;
    hbuf_.reset();
    return *this;
  }
  if (tab_ != o.tab_) alloc(*o.tab_);
  std::memcpy(static_cast<void*>(d_), o.d_, sizeof(cplx) * n_);
  return *this;
}

Jet& Jet::operator=(Jet&& o) noexcept {
  if (this == &o) return *this;
  tab_ = o.tab_;
  n_ = o.n_;
  if (tab_) {
    if (o.d_ == o.sbuf_.data()) {
      sbuf_ = o.sbuf_;
      d_ = sbuf_.data();
    } else {
      hbuf_ = std::move(o.hbuf_);
      d_ = hbuf_.get();
    }
  } else {
    d_ = nullptr;
  }
  o.tab_ = nullptr;
  o.d_ = nullptr;
  o.n_ = 0;
  return *this;
}

Jet& Jet::operator+=(const Jet& o) {
  for (int i = 0; i < n_; ++i) d_[i] += o.d_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (int i = 0; i < n_; ++i) d_[i] -= o.d_[i];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (int i = 0; i < n_; ++i) d_[i] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const JetTable& t = a.table();
  Jet r(t);
  const int n = t.size;
  const int32_t* prod = t.prod.data();
  for (int i = 0; i < n; ++i) {
    const cplx ai = a.d_[i];
    if (ai == cplx(0.0)) continue;
    const int jmax = t.degree_end[t.degree - t.deg_of[i]];
    const int32_t* row = prod + static_cast<size_t>(i) * n;
    for (int j = 0; j < jmax; ++j) {
      r.d_[row[j]] += ai * b.d_[j];
    }
  }
  return r;
}

Jet Jet::derivative(int var) const {
  const JetTable& t = *tab_;
  Jet r(t);
  for (int i = 0; i < n_; ++i) {
    int32_t k = t.dvar[static_cast<size_t>(i) * t.nvars + var];
    if (k >= 0) r.d_[k] += d_[i] * static_cast<double>(t.expo[i][var]);
  }
  return r;
}

Jet Jet::derivative(const ExpoVec& ax) const {
  Jet r = *this;
  for (int v = 0; v < tab_->nvars; ++v)
    for (int k = 0; k < ax[v]; ++k) r = r.derivative(v);
  return r;
}

cplx Jet::partial(const ExpoVec& ax) const {
  int i = tab_->index_of(ax);
  if (i < 0) throw std::out_of_range("Jet::partial: order beyond truncation");
  return d_[i] * tab_->fact[i];
}

Jet Jet::conjugate() const {
  Jet r = *this;
  for (int i = 0; i < n_; ++i) r.d_[i] = std::conj(r.d_[i]);
  return r;
}

Jet jet_compose(const Jet& a, const std::vector<cplx>& series) {
  const JetTable& t = a.table();
  Jet n = a;
  n[0] = 0.0;  // nilpotent part
  Jet r(t, series.back());
  for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
    r = r * n;
    r += series[static_cast<size_t>(k)];
  }
  return r;
}

Jet jet_sqrt(const Jet& a) {
  const int K = a.table().degree;
  cplx a0 = a.value();
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  cplx r = std::sqrt(a0);
  // binom(1/2, k) * a0^(1/2 - k)
  cplx coef = r;
  s[0] = coef;
  for (int k = 1; k <= K; ++k) {
    coef *= (0.5 - (k - 1)) / static_cast<double>(k) / a0;
    s[static_cast<size_t>(k)] = coef;
  }
  return jet_compose(a, s);
}

Jet jet_inv(const Jet& a) {
  const int K = a.table().degree;
  cplx a0 = a.value();
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  cplx coef = 1.0 / a0;
  s[0] = coef;
  for (int k = 1; k <= K; ++k) {
    coef *= -1.0 / a0;
    s[static_cast<size_t>(k)] = coef;
  }
  return jet_compose(a, s);
}

Jet jet_exp(const Jet& a) {
  const int K = a.table().degree;
  cplx e = std::exp(a.value());
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  double f = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) f *= k;
    s[static_cast<size_t>(k)] = e / f;
  }
  return jet_compose(a, s);
}

Jet jet_log(const Jet& a) {
  const int K = a.table().degree;
  cplx a0 = a.value();
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  s[0] = std::log(a0);
  cplx p = 1.0;
  for (int k = 1; k <= K; ++k) {
    p *= 1.0 / a0;
    s[static_cast<size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return jet_compose(a, s);
}

Jet jet_sin(const Jet& a) {
  const int K = a.table().degree;
  cplx sv = std::sin(a.value()), cv = std::cos(a.value());
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  double f = 1.0;
  const cplx cycle[4] = {sv, cv, -sv, -cv};
  for (int k = 0; k <= K; ++k) {
    if (k > 0) f *= k;
    s[static_cast<size_t>(k)] = cycle[k % 4] / f;
  }
  return jet_compose(a, s);
}

Jet jet_cos(const Jet& a) {
  const int K = a.table().degree;
  cplx sv = std::sin(a.value()), cv = std::cos(a.value());
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  double f = 1.0;
  const cplx cycle[4] = {cv, -sv, -cv, sv};
  for (int k = 0; k <= K; ++k) {
    if (k > 0) f *= k;
    s[static_cast<size_t>(k)] = cycle[k % 4] / f;
  }
  return jet_compose(a, s);
}

Jet jet_tanh(const Jet& a) {
  // Taylor coefficients via t' = 1 - t^2 applied to the series directly.
  const int K = a.table().degree;
  std::vector<cplx> s(static_cast<size_t>(K) + 1);
  s[0] = std::tanh(a.value());
  for (int k = 0; k < K; ++k) {
    // (1 - t^2) coefficient at order k
    cplx conv = 0.0;
    for (int j = 0; j <= k; ++j) conv += s[static_cast<size_t>(j)] * s[static_cast<size_t>(k - j)];
    cplx rhs = (k == 0 ? cplx(1.0) : cplx(0.0)) - conv;
    s[static_cast<size_t>(k) + 1] = rhs / static_cast<double>(k + 1);
  }
  return jet_compose(a, s);
}

}  // namespace diraclab
