#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diraclab/jet.hpp"

using namespace diraclab;

namespace {

// central finite difference of a scalar function along one variable
template <typename F>
cplx fd(F f, std::vector<double> base, int var, double h = 1e-5) {
  auto hi = base, lo = base;
  hi[var] += h;
  lo[var] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

}  // namespace

TEST_CASE("polynomial product matches closed form") {
  const JetTable& t = JetTable::get(2, 4);
  Jet x = Jet::variable(t, 0, 2.0);
  Jet y = Jet::variable(t, 1, -1.0);
  Jet f = (x * x + cplx(3.0) * y) * (x - y);
  // f = (x^2 + 3y)(x - y) at (2,-1): (4-3)(3) = 3
  CHECK(std::abs(f.value() - cplx(3.0)) < 1e-14);
  // d/dx = 2x(x-y) + (x^2+3y) = 12 + 1 = 13
  ExpoVec dx{};
  dx[0] = 1;
  CHECK(std::abs(f.partial(dx) - cplx(13.0)) < 1e-13);
  // d2/dxdy = -2x + 3 = -1
  ExpoVec dxy{};
  dxy[0] = 1;
  dxy[1] = 1;
  CHECK(std::abs(f.partial(dxy) - cplx(-1.0)) < 1e-13);
  // d3/dx2dy = -2
  ExpoVec d2xy{};
  d2xy[0] = 2;
  d2xy[1] = 1;
  CHECK(std::abs(f.partial(d2xy) - cplx(-2.0)) < 1e-13);
}

TEST_CASE("analytic functions agree with finite differences") {
  const JetTable& t = JetTable::get(3, 3);
  auto eval = [](const std::vector<double>& v) {
    double s = v[0] * v[0] + 0.7 * v[1] * v[2] + 2.0;
    return cplx(std::sqrt(s) * std::tanh(v[1]) + std::exp(0.3 * v[2]) * std::sin(v[0]));
  };
  std::vector<double> base = {0.4, -0.8, 1.3};
  Jet x = Jet::variable(t, 0, base[0]);
  Jet y = Jet::variable(t, 1, base[1]);
  Jet z = Jet::variable(t, 2, base[2]);
  Jet s = x * x + cplx(0.7) * y * z + cplx(2.0);
  Jet f = jet_sqrt(s) * jet_tanh(y) + jet_exp(cplx(0.3) * z) * jet_sin(x);

  CHECK(std::abs(f.value() - eval(base)) < 1e-13);
  for (int v = 0; v < 3; ++v) {
    ExpoVec e{};
    e[v] = 1;
    cplx jd = f.partial(e);
    cplx nd = fd(eval, base, v);
    CHECK(std::abs(jd - nd) < 1e-6 * (1.0 + std::abs(jd)));
  }
  // a mixed second partial, nested finite differences
  ExpoVec e{};
  e[0] = 1;
  e[1] = 1;
  auto d0 = [&](std::vector<double> b) { return fd(eval, b, 0); };
  cplx nd = fd(d0, base, 1, 1e-4);
  CHECK(std::abs(f.partial(e) - nd) < 1e-5 * (1.0 + std::abs(nd)));
}

TEST_CASE("mixed partials commute") {
  const JetTable& t = JetTable::get(4, 4);
  Jet a = Jet::variable(t, 0, 0.3);
  Jet b = Jet::variable(t, 1, 0.9);
  Jet c = Jet::variable(t, 2, -0.2);
  Jet d = Jet::variable(t, 3, 0.5);
  Jet f = jet_exp(a * b * cplx(0.5)) * jet_cos(c + d * d);
  Jet f_ab = f.derivative(0).derivative(1);
  Jet f_ba = f.derivative(1).derivative(0);
  for (int i = 0; i < f_ab.size(); ++i) CHECK(std::abs(f_ab[i] - f_ba[i]) < 1e-12);
}

TEST_CASE("inverse and log round trips") {
  const JetTable& t = JetTable::get(2, 5);
  Jet x = Jet::variable(t, 0, 1.7);
  Jet y = Jet::variable(t, 1, -0.4);
  Jet g = cplx(2.0) + x * y + jet_cos(x);
  Jet gi = jet_inv(g);
  Jet prod = g * gi;
  CHECK(std::abs(prod.value() - cplx(1.0)) < 1e-14);
  for (int i = 1; i < prod.size(); ++i) CHECK(std::abs(prod[i]) < 1e-13);

  Jet lg = jet_log(g);
  Jet back = jet_exp(lg);
  for (int i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - g[i]) < 1e-12);
}
