#include "diraclab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace diraclab {

void integrate_dp54(const OdeRhs& rhs, double t0, double t1, Eigen::VectorXd& y,
                    const OdeOptions& opt, const OdeStepHook& hook) {
  if (t1 == t0) return;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const int n = static_cast<int>(y.size());
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  double t = t0;
  rhs(t, y, k1);
  double h = opt.initial_step;
  if (h <= 0.0) {
    double ynorm = y.norm() + opt.atol;
    double dnorm = k1.norm() + opt.atol;
    h = 0.01 * ynorm / dnorm;
    h = std::min(h, 0.1 * span);
    if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * span;
  }

  const double hmin = span * 1e-15;
  bool fsal_valid = true;
  for (long step = 0; step < opt.max_steps; ++step) {
    double remaining = (t1 - t) * dir;
    if (remaining <= span * 1e-14) return;
    bool clipped = h >= remaining;
    double h_eff = clipped ? remaining : h;
    const double hs = dir * h_eff;

    if (!fsal_valid) rhs(t, y, k1);
    ytmp = y + hs * (a21 * k1);
    rhs(t + c2 * hs, ytmp, k2);
    ytmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, ytmp, k3);
    ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, ytmp, k4);
    ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, ytmp, k5);
    ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, ytmp, k6);
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hs, ynew, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double scale2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = err[i] / sc;
      scale2 += q * q;
    }
    double enorm = std::sqrt(scale2 / n);

    if (enorm <= 1.0) {
      t += hs;
      y = ynew;
      k1 = k7;  // first-same-as-last
      fsal_valid = true;
      if (hook) {
        hook(t, y);
        fsal_valid = false;  // the hook may have moved the state
      }
    } else {
      fsal_valid = false;
    }
    double fac = 0.9 * std::pow(std::max(enorm, 1e-10), -0.2);
    h = h_eff * std::clamp(fac, 0.2, 5.0);
    if (h < hmin && enorm > 1.0)
      throw StepFailure("integrate_dp54: step size underflow at t = " + std::to_string(t));
  }
  throw StepFailure("integrate_dp54: step budget exhausted");
}

}  // namespace diraclab
