#pragma once

#include <cstdint>
#include <vector>

#include "diraclab/dirac_model.hpp"
#include "diraclab/ode.hpp"

namespace diraclab {

struct PhasePoint {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

// Combined state of one transported trajectory: base point, the 2x2 spin
// transport, optionally the 4x4 transport, and a sphere point.
struct TransportState {
  PhasePoint z;
  Mat2 D = Mat2::Identity();
  Mat4 d = Mat4::Identity();
  bool has_d = false;
  Vec3 n = Vec3::UnitZ();
  double t = 0.0;
  Branch branch = Branch::plus;
  double restoration_drift = 0.0;  // accumulated polar/renormalization magnitude
};

struct FlowSample {
  std::vector<double> t;
  std::vector<PhasePoint> z;
  std::vector<Vec3> n;
  std::vector<double> energy;
  std::vector<double> helicity;  // n . unit kinetic momentum, when defined
  double energy_drift = 0.0;
};

// d/dt (x, p) along the branch Hamiltonian
void flow_rhs(const DiracSymbolSet& set, Branch b, const Vec3& x, const Vec3& p, Vec3& dx,
              Vec3& dp);

PhasePoint hamiltonian_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0, double t,
                            double tol = 1e-10);

TransportState spin_transport_2x2(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                  double t, double tol = 1e-10);
// co-integrates the 4x4 and 2x2 transports
TransportState spin_transport_4x4(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                  double t, double tol = 1e-10);

Vec3 precess_spin(const DiracSymbolSet& set, Branch b, const PhasePoint& z0, const Vec3& n0,
                  double t, double tol = 1e-10);

// (Phi^t(z0), R(D(t)) n0)
TransportState skew_product_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                                 const Vec3& n0, double t, double tol = 1e-10);

FlowSample sample_skew_flow(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                            const Vec3& n0, const std::vector<double>& times,
                            double tol = 1e-10);

// Relativistic cyclotron frequency e c |B| / eps at a point (uniform-field
// closed form used by the tests and to size experiment times).
double cyclotron_frequency(const DiracSymbolSet& set, const PhasePoint& z);

// Time for x1 to complete one oscillation of the reduced motion, measured by
// integrating until the (x1 - x1(0), dx1) loop closes; used to size
// experiment horizons on periodic presets.
double estimate_orbit_period(const DiracSymbolSet& set, Branch b, const PhasePoint& z0,
                             double tol = 1e-10, double t_max = 200.0);

struct InvarianceCheck {
  double mean_before = 0.0, se_before = 0.0;
  double mean_after = 0.0, se_after = 0.0;
  long accepted = 0;
};

using SphereObservable = std::function<double(const Vec3& x, const Vec3& p, const Vec3& n)>;

struct ShellSamplerOptions {
  double window = 0.02;     // half width of the accepted |h - E| slab
  long max_draws = 4000000;
  uint64_t seed = 1;
  double p_margin = 0.5;    // widen the momentum box beyond the shell bound
  double flow_tol = 1e-9;
};

// Monte-Carlo check that the product of the microcanonical shell measure and
// the sphere area measure is invariant under the skew-product flow: the
// weighted mean of b and of b after time t agree within the errors.
InvarianceCheck measure_invariance_check(const DiracSymbolSet& set, Branch b, double E,
                                         const SphereObservable& obs, long samples, double t,
                                         const ShellSamplerOptions& opt = {});

}  // namespace diraclab
