#include "symplab/common.hpp"

#include <atomic>
#include <cmath>

namespace symplab {

void parallel_for(int count, const std::function<void(int)>& fn) {
  int workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {
double bump_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double bump_fp(double x) {
  return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0;
}
}  // namespace

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = bump_f(x), b = bump_f(1.0 - x);
  return a / (a + b);
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = bump_f(x), b = bump_f(1.0 - x);
  double ap = bump_fp(x), bp = -bump_fp(1.0 - x);
  double den = a + b;
  return (ap * den - a * (ap + bp)) / (den * den);
}

double rho_step(double t) { return 0.1 * t + 0.9 * smoothstep(t); }

double rho_step_derivative(double t) {
  return 0.1 + 0.9 * smoothstep_derivative(t);
}

}  // namespace symplab
