#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symplab/flow.hpp"
#include "symplab/hamiltonian.hpp"

namespace symplab {

struct FixedPointRecord {
  Vector z;
  double action = 0.0;
  long long cz = 0;
  double mean_cz = 0.0;
  double margin = 0.0;  // |det(dphi^1(z) - I)|
  std::optional<long long> lefschetz;  // n = 1 only
  bool twist = false;
  int primitive_period = 1;
  bool degenerate = false;  // index taken from the lower-semicontinuous value
  int family = -1;          // shared id for circle families, -1 if isolated
  std::string visibility;   // "visible" or "unknown"
};

struct SearchConfig {
  double radius = 3.0;
  int seeds_per_axis = 0;  // 0 = dimension-dependent default (21 / 9 / 3)
  double newton_tol = 1e-10;
  double dedupe_tol = 1e-6;
  int max_newton_iters = 40;
  double twist_tol = 1e-4;  // per unit period
};

// Multistart damped Newton on phi^1_H(z) - z, deduplicated and classified.
// Output is deterministic: sorted lexicographically by coordinates.
std::vector<FixedPointRecord> find_fixed_points(const AsymQuadHamiltonian& H,
                                                const SearchConfig& config);

// Fixed points of every iterate up to max_period, with primitive periods
// assigned by divisor filtering.
std::map<int, std::vector<FixedPointRecord>> periodic_census(
    const AsymQuadHamiltonian& H, int max_period, const SearchConfig& config);

// Winding number of w -> phi^1_H(w) - w around a circle about z (n = 1).
long long lefschetz_2d(const AsymQuadHamiltonian& H, const Vector& z,
                       double radius);

}  // namespace symplab
