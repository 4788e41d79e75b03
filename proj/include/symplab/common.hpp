// symplab: numerical machinery for asymptotically unitary Hamiltonian
// dynamics on R^{2n} — error taxonomy, threading cap, shared helpers.
#pragma once

#include <Eigen/Dense>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace symplab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A precondition or input-schema violation (CLI exit code 2).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical failure: non-convergence, resonance, step underflow,
// refinement-needed (CLI exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Maximum worker threads, capped by the SYMPLAB_THREADS environment variable.
inline int max_threads() {
  static const int cached = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("SYMPLAB_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
  }();
  return cached;
}

// Deterministic parallel map: applies fn to indices [0, count) on up to
// max_threads() workers; results are indexed, so the merge order never
// depends on scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

// Smoothstep s(x) built from the e^{-1/x} bump: s=0 for x<=0, s=1 for x>=1,
// strictly increasing in between, all derivatives vanish at the ends.
double smoothstep(double x);
double smoothstep_derivative(double x);

// The module's fixed reparametrization step rho(t) = 0.1*t + 0.9*s(t);
// rho(0)=0, rho(1)=1, rho' <= 1.9 (max slope 0.1 + 0.9*2 attained at t=1/2).
double rho_step(double t);
double rho_step_derivative(double t);

}  // namespace symplab
