#include "diraclab/fields.hpp"

#include <cmath>

namespace diraclab {

namespace {

FieldPreset::XJets seed_x(const Vec3& x, int degree) {
  const JetTable& t = JetTable::get(3, degree);
  FieldPreset::XJets j;
  for (int a = 0; a < 3; ++a) j[a] = Jet::variable(t, a, x[a]);
  return j;
}

double dpart(const Jet& j, int var) {
  ExpoVec e{};
  e[var] = 1;
  return std::real(j.partial(e));
}

}  // namespace

double FieldPreset::phi_at(const Vec3& x) const {
  return std::real(phi(seed_x(x, 0)).value());
}

Vec3 FieldPreset::A_at(const Vec3& x) const {
  XJets a = vecA(seed_x(x, 0));
  return Vec3(std::real(a[0].value()), std::real(a[1].value()), std::real(a[2].value()));
}

Vec3 FieldPreset::E_at(const Vec3& x) const {
  Jet f = phi(seed_x(x, 1));
  return Vec3(-dpart(f, 0), -dpart(f, 1), -dpart(f, 2));
}

Eigen::Matrix3d FieldPreset::grad_A_at(const Vec3& x) const {
  XJets a = vecA(seed_x(x, 1));
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = dpart(a[i], j);
  return g;
}

Vec3 FieldPreset::B_at(const Vec3& x) const {
  Eigen::Matrix3d g = grad_A_at(x);
  return Vec3(g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1));
}

namespace {
Jet zero_like(const FieldPreset::XJets& x) { return Jet(x[0].table(), 0.0); }
}  // namespace

FieldPreset preset_free() {
  FieldPreset f;
  f.name = "free";
  f.grid_compatible = true;
  f.phi = [](const FieldPreset::XJets& x) { return zero_like(x); };
  f.vecA = [](const FieldPreset::XJets& x) {
    return FieldPreset::XJets{zero_like(x), zero_like(x), zero_like(x)};
  };
  return f;
}

FieldPreset preset_constant_b(const Vec3& B) {
  FieldPreset f;
  f.name = "constant-b";
  f.grid_compatible = false;  // linear gauge, classical modules only
  f.phi = [](const FieldPreset::XJets& x) { return zero_like(x); };
  f.vecA = [B](const FieldPreset::XJets& x) {
    // A = B x r / 2
    FieldPreset::XJets a;
    a[0] = 0.5 * (B[1] * x[2] - B[2] * x[1]);
    a[1] = 0.5 * (B[2] * x[0] - B[0] * x[2]);
    a[2] = 0.5 * (B[0] * x[1] - B[1] * x[0]);
    return a;
  };
  return f;
}

FieldPreset preset_constant_e(const Vec3& E, double phi_cap) {
  FieldPreset f;
  f.name = "constant-e";
  f.grid_compatible = false;
  f.phi = [E, phi_cap](const FieldPreset::XJets& x) {
    Jet s = -(E[0] * x[0] + E[1] * x[1] + E[2] * x[2]) * cplx(1.0 / phi_cap);
    return cplx(phi_cap) * jet_tanh(s);
  };
  f.vecA = [](const FieldPreset::XJets& x) {
    return FieldPreset::XJets{zero_like(x), zero_like(x), zero_like(x)};
  };
  return f;
}

FieldPreset preset_periodic_phi(double phi0, const Vec3& box) {
  FieldPreset f;
  f.name = "periodic-phi";
  f.grid_compatible = true;
  f.box = box;
  f.phi = [phi0, box](const FieldPreset::XJets& x) {
    Jet prod(x[0].table(), phi0);
    for (int a = 0; a < 3; ++a) prod = prod * jet_cos(x[a] * cplx(2.0 * M_PI / box[a]));
    return prod;
  };
  f.vecA = [](const FieldPreset::XJets& x) {
    return FieldPreset::XJets{zero_like(x), zero_like(x), zero_like(x)};
  };
  return f;
}

FieldPreset preset_periodic_b(double B0, const Vec3& box) {
  // A_2(x_1) = (B0 L1 / 2 pi) sin(2 pi x1/L1) so that B_3 = B0 cos(2 pi x1/L1);
  // the field is close to uniform near the zeros of the sine.
  FieldPreset f;
  f.name = "periodic-b";
  f.grid_compatible = true;
  f.box = box;
  f.phi = [](const FieldPreset::XJets& x) { return zero_like(x); };
  double L = box[0];
  f.vecA = [B0, L](const FieldPreset::XJets& x) {
    FieldPreset::XJets a;
    a[0] = zero_like(x);
    a[1] = cplx(B0 * L / (2.0 * M_PI)) * jet_sin(x[0] * cplx(2.0 * M_PI / L));
    a[2] = zero_like(x);
    return a;
  };
  return f;
}

FieldPreset preset_periodic_em(double phi0, double a2, const Vec3& box) {
  FieldPreset f;
  f.name = "periodic-em";
  f.grid_compatible = true;
  f.box = box;
  double L = box[0];
  f.phi = [phi0, L](const FieldPreset::XJets& x) {
    return cplx(phi0) * jet_cos(x[0] * cplx(2.0 * M_PI / L));
  };
  f.vecA = [a2, L](const FieldPreset::XJets& x) {
    FieldPreset::XJets a;
    a[0] = zero_like(x);
    a[1] = cplx(a2) * jet_sin(x[0] * cplx(2.0 * M_PI / L));
    a[2] = zero_like(x);
    return a;
  };
  return f;
}

FieldPreset preset_trig_series(const std::string& name, const Vec3& box,
                               std::vector<TrigTerm> phi_terms,
                               std::array<std::vector<TrigTerm>, 3> A_terms) {
  FieldPreset f;
  f.name = name;
  f.grid_compatible = true;
  f.box = box;
  auto series = [box](const std::vector<TrigTerm>& terms, const FieldPreset::XJets& x) {
    Jet acc = zero_like(x);
    for (const auto& t : terms) {
      Jet arg(x[0].table(), t.phase);
      for (int a = 0; a < 3; ++a)
        if (t.n[a] != 0) arg += x[a] * cplx(2.0 * M_PI * t.n[a] / box[a]);
      acc += cplx(t.amp) * jet_cos(arg);
    }
    return acc;
  };
  f.phi = [series, phi_terms](const FieldPreset::XJets& x) { return series(phi_terms, x); };
  f.vecA = [series, A_terms](const FieldPreset::XJets& x) {
    return FieldPreset::XJets{series(A_terms[0], x), series(A_terms[1], x),
                              series(A_terms[2], x)};
  };
  return f;
}

}  // namespace diraclab
