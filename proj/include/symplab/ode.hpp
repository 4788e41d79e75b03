#pragma once

#include <functional>
#include <vector>

#include "symplab/common.hpp"

namespace symplab {

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

struct OdeOptions {
  // Local error per unit time, applied as both absolute and relative weight.
  double tol = 1e-9;
  // Interior times where the right-hand side may lose smoothness; the
  // integrator lands on each one exactly and restarts.
  std::vector<double> breakpoints;
  double max_step = 0.25;
  double min_step = 1e-14;
};

// Adaptive Dormand-Prince 5(4) over [t0, t1] (either direction). `y` holds
// the state and is advanced in place. `observer`, when set, is called with
// (t, y, f(t,y)) at t0 and after every accepted step; it may throw to abort
// (e.g. a blow-up guard).
OdeStats integrate_ode(
    const std::function<Vector(double, const Vector&)>& f, Vector& y,
    double t0, double t1, const OdeOptions& opts,
    const std::function<void(double, const Vector&, const Vector&)>& observer =
        nullptr);

}  // namespace symplab
