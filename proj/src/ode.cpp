#include "symplab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace symplab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

// One segment with smooth right-hand side.
void integrate_segment(
    const std::function<Vector(double, const Vector&)>& f, Vector& y,
    double t0, double t1, const OdeOptions& opts, OdeStats& stats,
    const std::function<void(double, const Vector&, const Vector&)>& observer) {
  if (t0 == t1) return;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  Vector k1 = f(t, y);
  ++stats.rhs_evals;
  if (observer) observer(t, y, k1);

  double h = dir * std::min({opts.max_step, span, 0.05});
  bool fsal_valid = true;

  while (dir * (t1 - t) > 0.0) {
    if (std::abs(h) > dir * (t1 - t)) h = t1 - t;
    if (std::abs(h) < opts.min_step) {
      throw NumericalError("ode: step size underflow at t=" + std::to_string(t));
    }
    if (!fsal_valid) {
      k1 = f(t, y);
      ++stats.rhs_evals;
      fsal_valid = true;
    }
    Vector k2 = f(t + c2 * h, y + h * (a21 * k1));
    Vector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Vector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vector k5 =
        f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vector k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                  a65 * k5));
    Vector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vector k7 = f(t + h, ynew);
    stats.rhs_evals += 6;
    Vector err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm2 = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double sc =
          opts.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
      double r = err[i] / sc;
      norm2 += r * r;
    }
    double errnorm = std::sqrt(norm2 / std::max<long>(1, y.size()));
    if (!std::isfinite(errnorm)) {
      // A NaN would otherwise poison the step-size update and loop forever.
      throw NumericalError("ode: non-finite right-hand side at t=" +
                           std::to_string(t));
    }

    if (errnorm <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      ++stats.accepted;
      if (observer) observer(t, y, k1);
    } else {
      ++stats.rejected;
      fsal_valid = false;
    }
    double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, 5.0);
    h *= fac;
    if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
  }
}

}  // namespace

OdeStats integrate_ode(
    const std::function<Vector(double, const Vector&)>& f, Vector& y,
    double t0, double t1, const OdeOptions& opts,
    const std::function<void(double, const Vector&, const Vector&)>& observer) {
  OdeStats stats;
  std::vector<double> cuts;
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  for (double b : opts.breakpoints) {
    if (b > lo + 1e-15 && b < hi - 1e-15) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  if (t1 < t0) std::reverse(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) {
                           return std::abs(a - b) < 1e-14;
                         }),
             cuts.end());

  double t = t0;
  bool first = true;
  for (double c : cuts) {
    // Only the very first segment reports its left endpoint: the seams would
    // otherwise be observed twice.
    integrate_segment(
        f, y, t, c, opts, stats,
        first ? observer
              : [&](double tt, const Vector& yy, const Vector& ff) {
                  if (observer && tt != t) observer(tt, yy, ff);
                });
    t = c;
    first = false;
  }
  integrate_segment(f, y, t, t1, opts, stats,
                    first ? observer
                          : [&](double tt, const Vector& yy, const Vector& ff) {
                              if (observer && tt != t) observer(tt, yy, ff);
                            });
  return stats;
}

}  // namespace symplab
