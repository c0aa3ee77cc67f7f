#pragma once

#include <Eigen/Dense>
#include <functional>

#include "diraclab/errors.hpp"

namespace diraclab {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: choose from the first derivative
  long max_steps = 4000000;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;
// invoked after every accepted step; may project the state back onto a manifold
using OdeStepHook = std::function<void(double t, Eigen::VectorXd& y)>;

// Adaptive embedded Runge-Kutta 5(4), Dormand-Prince coefficients.
void integrate_dp54(const OdeRhs& rhs, double t0, double t1, Eigen::VectorXd& y,
                    const OdeOptions& opt = {}, const OdeStepHook& hook = {});

}  // namespace diraclab
