#include "symplab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>

#include "symplab/cz.hpp"
#include "symplab/linalg.hpp"

namespace symplab {

namespace {

constexpr double kCoarseTol = 1e-6;
constexpr double kNewtonFlowTol = 1e-8;
constexpr double kClassifyTol = 1e-9;
// Endpoint determinant below this is treated as degenerate; the measured
// margin at a true circle family floats around the integration accuracy.
constexpr double kDegenerateMargin = 1e-6;

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

std::vector<Vector> build_seeds(int n, const SearchConfig& cfg) {
  int per_axis = cfg.seeds_per_axis;
  if (per_axis <= 0) per_axis = (n == 1) ? 21 : (n == 2) ? 9 : 3;
  int d = 2 * n;
  std::vector<Vector> seeds;
  // Uniform grid on the cube, restricted to the ball.
  std::vector<int> idx(d, 0);
  while (true) {
    Vector z(d);
    for (int j = 0; j < d; ++j) {
      z[j] = per_axis == 1
                 ? 0.0
                 : -cfg.radius + 2.0 * cfg.radius * idx[j] / (per_axis - 1);
    }
    if (z.norm() <= cfg.radius * (1.0 + 1e-12)) seeds.push_back(z);
    int j = 0;
    while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  // Quasi-random fill.
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  int accepted = 0;
  for (int i = 1; accepted < 100 && i < 4000; ++i) {
    Vector z(d);
    for (int j = 0; j < d; ++j) {
      z[j] = (2.0 * halton(i, primes[j % 6]) - 1.0) * cfg.radius;
    }
    if (z.norm() <= cfg.radius) {
      seeds.push_back(z);
      ++accepted;
    }
  }
  return seeds;
}

struct NewtonRoot {
  Vector z;
  bool converged = false;
};

NewtonRoot newton_from_seed(const AsymQuadHamiltonian& H, Vector z,
                            const SearchConfig& cfg) {
  const int d = static_cast<int>(z.size());
  // Levenberg-Marquardt on 1/2 |phi^1(z) - z|^2: high damping follows the
  // residual gradient into the basin of the nearest root (essential when
  // fixed points come in one-parameter circle families), low damping gives
  // the quadratic local convergence of Gauss-Newton.
  double lm = 1e-3;
  // Integration tolerance tracks the residual so the correction is never
  // dominated by integration noise near a root.
  double ftol = kNewtonFlowTol;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_newton_iters; ++it) {
    FlowResult fr;
    try {
      fr = flow(H, z, 1.0, ftol, true);
      res = (fr.endpoint - z).norm();
      double want = std::clamp(1e-3 * res, 1e-12, kNewtonFlowTol);
      if (want < ftol) {
        ftol = want;
        fr = flow(H, z, 1.0, ftol, true);
      }
    } catch (const NumericalError&) {
      return {z, false};
    }
    Vector F = fr.endpoint - z;
    res = F.norm();
    if (res < cfg.newton_tol) return {z, true};
    Matrix Jac = fr.linearization->endpoint() - Matrix::Identity(d, d);
    Matrix JtJ = Jac.transpose() * Jac;
    Vector g = Jac.transpose() * F;
    bool improved = false;
    for (int trial = 0; trial < 16; ++trial) {
      Vector step =
          (JtJ + lm * Matrix::Identity(d, d)).ldlt().solve(-g);
      if (!step.allFinite()) break;
      Vector zt = z + step;
      if (zt.norm() > 3.0 * cfg.radius + 1.0) {
        lm *= 10.0;
        continue;
      }
      double rt;
      try {
        rt = (flow(H, zt, 1.0, ftol, false).endpoint - zt).norm();
      } catch (const NumericalError&) {
        lm *= 10.0;
        continue;
      }
      if (rt < res || rt < cfg.newton_tol) {
        z = zt;
        improved = true;
        lm = std::max(1e-12, lm / 3.0);
        break;
      }
      lm *= 10.0;
      if (lm > 1e12) break;
    }
    if (!improved) {
      // Step rejected: the residual may be at the integration noise floor.
      if (ftol > 2e-12) {
        ftol = std::max(1e-12, 1e-3 * ftol);
        lm = std::max(lm, 1e-6);
        continue;
      }
      return {z, false};
    }
  }
  // Accept anyway if the final polish meets the tolerance.
  double final_res = (flow(H, z, 1.0, 1e-12, false).endpoint - z).norm();
  return {z, final_res < cfg.newton_tol};
}

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return a[i] < b[i];
  }
  return false;
}

// Internal worker shared by find_fixed_points and the census: `period` scales
// the per-unit-period twist comparison when H is itself an iterate.
std::vector<FixedPointRecord> find_fixed_points_impl(
    const AsymQuadHamiltonian& H, const SearchConfig& cfg, int period) {
  if (cfg.newton_tol >= cfg.dedupe_tol) {
    throw ValidationError("find_fixed_points: newton_tol must be < dedupe_tol");
  }
  const int d = 2 * H.n();
  double mean_inf = index_at_infinity(H).mean;

  std::vector<Vector> seeds = build_seeds(H.n(), cfg);

  // Cheap residual pass to order the seeds by promise.
  std::vector<double> residual(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), [&](int i) {
    try {
      residual[i] =
          (flow(H, seeds[i], 1.0, kCoarseTol, false).endpoint - seeds[i])
              .norm();
    } catch (const NumericalError&) {
      residual[i] = std::numeric_limits<double>::infinity();
    }
  });
  std::vector<size_t> order(seeds.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return residual[a] < residual[b]; });

  std::vector<Vector> roots;
  for (size_t oi : order) {
    if (!std::isfinite(residual[oi])) continue;
    // Skip seeds already inside the basin boundary of a found root.
    bool near = false;
    for (const Vector& r : roots) {
      if ((seeds[oi] - r).norm() < cfg.dedupe_tol) {
        near = true;
        break;
      }
    }
    if (near) continue;
    NewtonRoot nr = newton_from_seed(H, seeds[oi], cfg);
    if (!nr.converged) continue;
    if (nr.z.norm() > cfg.radius * (1.0 + 1e-6)) continue;
    bool dup = false;
    for (const Vector& r : roots) {
      if ((nr.z - r).norm() < cfg.dedupe_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) roots.push_back(nr.z);
  }

  std::sort(roots.begin(), roots.end(), lex_less);

  std::vector<FixedPointRecord> out(roots.size());
  parallel_for(static_cast<int>(roots.size()), [&](int i) {
    FixedPointRecord rec;
    rec.z = roots[i];
    // Fast-rotating iterates need denser linearization samples than the
    // default tolerance provides; the winding self-check tells us when.
    FlowResult fr = flow(H, rec.z, 1.0, kClassifyTol, true);
    IndexReport ir;
    for (double ctol = kClassifyTol;; ctol *= 1e-2) {
      const SymplecticPath& attempt = *fr.linearization;
      rec.margin = attempt.endpoint_margin();
      try {
        ir = (rec.margin < kDegenerateMargin) ? cz_index_lsc(attempt)
                                              : cz_index(attempt);
        break;
      } catch (const NumericalError&) {
        if (ctol <= 1e-12) throw;
        fr = flow(H, rec.z, 1.0, std::max(1e-12, ctol * 1e-2), true);
      }
    }
    const SymplecticPath& lin = *fr.linearization;
    rec.cz = ir.cz;
    rec.degenerate = ir.degenerate_endpoint || rec.margin < kDegenerateMargin;
    rec.mean_cz = mean_cz(lin);
    rec.action = action(H, rec.z);
    rec.twist =
        std::abs(rec.mean_cz - mean_inf) / period > cfg.twist_tol;
    // Defined only for isolated fixed points; members of a degenerate
    // circle family are left without one.
    if (H.n() == 1 && rec.margin > kDegenerateMargin) {
      Matrix D = lin.endpoint() - Matrix::Identity(d, d);
      rec.lefschetz = D.determinant() > 0 ? 1 : -1;
    }
    if (rec.margin > kDegenerateMargin ||
        (rec.lefschetz.has_value() && *rec.lefschetz != 0)) {
      rec.visibility = "visible";
    } else {
      rec.visibility = "unknown";
    }
    out[i] = std::move(rec);
  });

  // Circle families (n = 1): cluster by orbit radius.
  if (H.n() == 1 && out.size() >= 3) {
    std::vector<size_t> by_r(out.size());
    for (size_t i = 0; i < out.size(); ++i) by_r[i] = i;
    std::sort(by_r.begin(), by_r.end(), [&](size_t a, size_t b) {
      return out[a].z.norm() < out[b].z.norm();
    });
    int next_family = 0;
    size_t start = 0;
    double cluster_tol = std::max(10.0 * cfg.dedupe_tol, 1e-5);
    for (size_t i = 1; i <= by_r.size(); ++i) {
      bool close = i < by_r.size() &&
                   out[by_r[i]].z.norm() - out[by_r[i - 1]].z.norm() <
                       cluster_tol;
      if (!close) {
        if (i - start >= 3) {
          for (size_t j = start; j < i; ++j) out[by_r[j]].family = next_family;
          ++next_family;
        }
        start = i;
      }
    }
  }

  if (out.empty()) {
    std::cerr << "warning: no fixed points found inside radius " << cfg.radius
              << " although the map is nondegenerate at infinity\n";
  }
  return out;
}

}  // namespace

std::vector<FixedPointRecord> find_fixed_points(const AsymQuadHamiltonian& H,
                                                const SearchConfig& config) {
  return find_fixed_points_impl(H, config, 1);
}

std::map<int, std::vector<FixedPointRecord>> periodic_census(
    const AsymQuadHamiltonian& H, int max_period, const SearchConfig& config) {
  if (max_period < 1) throw ValidationError("periodic_census: max_period >= 1");
  std::map<int, std::vector<FixedPointRecord>> table;
  for (int p = 1; p <= max_period; ++p) {
    auto Hp = AsymQuadHamiltonian::iterate(H, p);
    auto recs = find_fixed_points_impl(Hp, config, p);
    for (FixedPointRecord& rec : recs) {
      rec.primitive_period = p;
      // Divisor filtering: relabel when the point already returns after a
      // proper divisor of p. The direct return test also catches fresh
      // samples of a divisor-period circle family that match none of the
      // previously stored points.
      for (int dval = 1; dval < p; ++dval) {
        if (p % dval != 0) continue;
        Vector w = rec.z;
        for (int s = 0; s < dval; ++s) {
          w = flow(H, w, 1.0, 1e-10, false).endpoint;
        }
        if ((w - rec.z).norm() < config.dedupe_tol) {
          rec.primitive_period = dval;
          break;
        }
      }
    }
    table[p] = std::move(recs);
  }
  return table;
}

long long lefschetz_2d(const AsymQuadHamiltonian& H, const Vector& z,
                       double radius) {
  if (H.n() != 1) throw ValidationError("lefschetz_2d: requires n = 1");
  if (radius <= 0.0) throw ValidationError("lefschetz_2d: radius must be > 0");
  int samples = 256;
  while (true) {
    std::vector<double> args(samples + 1);
    bool refine = false;
    double total = 0.0;
    double prev_arg = 0.0;
    for (int i = 0; i <= samples; ++i) {
      double th = kTwoPi * i / samples;
      Vector w = z;
      w[0] += radius * std::cos(th);
      w[1] += radius * std::sin(th);
      Vector F = flow(H, w, 1.0, 1e-9, false).endpoint - w;
      if (F.norm() < 1e-10) {
        throw NumericalError("lefschetz_2d: fixed point on the sampling circle");
      }
      double a = std::atan2(F[1], F[0]);
      if (i > 0) {
        double inc = a - prev_arg;
        while (inc > kPi) inc -= kTwoPi;
        while (inc < -kPi) inc += kTwoPi;
        if (std::abs(inc) > kPi / 2) {
          refine = true;
          break;
        }
        total += inc;
      }
      prev_arg = a;
    }
    if (!refine) {
      long long w = std::llround(total / kTwoPi);
      if (std::abs(total / kTwoPi - w) > 0.05) {
        throw NumericalError("lefschetz_2d: winding failed integer self-check");
      }
      return w;
    }
    samples *= 2;
    if (samples > 16384) {
      throw NumericalError("lefschetz_2d: winding did not stabilize");
    }
  }
}

}  // namespace symplab
