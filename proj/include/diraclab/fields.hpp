#pragma once

#include <array>
#include <functional>
#include <string>

#include "diraclab/algebra.hpp"

namespace diraclab {

struct Constants {
  double m = 1.0;
  double c = 1.0;
  double e = 1.0;

  double mc2() const { return m * c * c; }
};

// Static external electromagnetic fields given through smooth potentials.
// The potentials are jet closures, so every consumer gets exact derivatives
// to any order from the same definition.
class FieldPreset {
public:
  using XJets = std::array<Jet, 3>;

  std::string name = "free";
  bool grid_compatible = true;          // smooth and periodic on `box`
  Vec3 box = Vec3::Constant(2.0 * M_PI);
  std::function<Jet(const XJets&)> phi;
  std::function<XJets(const XJets&)> vecA;

  double phi_at(const Vec3& x) const;
  Vec3 A_at(const Vec3& x) const;
  Vec3 E_at(const Vec3& x) const;               // -grad phi
  Vec3 B_at(const Vec3& x) const;               // curl A
  Eigen::Matrix3d grad_A_at(const Vec3& x) const;  // (i,j) -> dA_i/dx_j
};

FieldPreset preset_free();
FieldPreset preset_constant_b(const Vec3& B);                    // classical use only
FieldPreset preset_constant_e(const Vec3& E, double phi_cap);    // tanh-capped potential
FieldPreset preset_periodic_phi(double phi0, const Vec3& box);
FieldPreset preset_periodic_b(double B0, const Vec3& box);
// combined smooth periodic electromagnetic preset: a cosine potential plus a
// transverse sine vector potential, both varying along the first axis
FieldPreset preset_periodic_em(double phi0, double a2, const Vec3& box);

// Trigonometric series preset: phi = sum amp cos(2 pi n.x/L + phase), and the
// same shape per component of A.
struct TrigTerm {
  double amp = 0.0;
  std::array<int, 3> n{0, 0, 0};
  double phase = 0.0;
};
FieldPreset preset_trig_series(const std::string& name, const Vec3& box,
                               std::vector<TrigTerm> phi_terms,
                               std::array<std::vector<TrigTerm>, 3> A_terms);

}  // namespace diraclab
