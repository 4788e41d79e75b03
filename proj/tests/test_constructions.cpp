#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symplab/constructions.hpp"
#include "symplab/cz.hpp"
#include "symplab/flow.hpp"
#include "symplab/hamiltonian.hpp"
#include "symplab/orbits.hpp"

using namespace symplab;

namespace {

AsymQuadHamiltonian bumped(double alpha, double c0) {
  Bump b;
  b.center = Vector::Zero(2);
  b.center[0] = 0.5;
  b.width = 1.0;
  b.coeff.c0 = c0;
  return AsymQuadHamiltonian::diagonal({alpha}, {b});
}

}  // namespace

TEST_CASE("index difference of iterates is even with bounded deviation") {
  auto H1 = AsymQuadHamiltonian::diagonal({2.0});
  auto [s1, m1] = sigma_and_mu(H1, 5, 3);
  // floor(10 / 2pi) = 1, floor(6 / 2pi) = 0: per-plane difference 2.
  CHECK(s1 == 2);
  CHECK(m1 == 1);

  // Paired +/- angles: mean index 0, |sigma| <= 2n.
  auto H2 = AsymQuadHamiltonian::diagonal({1.3, -1.3});
  auto [s2, m2] = sigma_and_mu(H2, 7, 5);
  CHECK(std::abs(s2) <= 4);
  CHECK(s2 == 2 * m2);

  CHECK_THROWS_AS(sigma_and_mu(H1, 3, 3), ValidationError);
  CHECK_THROWS_AS(sigma_and_mu(H1, 3, 5), ValidationError);
}

TEST_CASE("winding loop carries the exact requested loop index") {
  auto H = AsymQuadHamiltonian::diagonal({2.0});
  auto P0 = build_Pmu(H, 3, 1, 0);  // 2 * 2.0 = 4.0 < 2 pi: floor 0
  REQUIRE(P0.m.size() == 1);
  CHECK(P0.m[0] == 0);
  CHECK(P0.maslov == 0);

  auto [sigma, mu] = sigma_and_mu(H, 5, 3);
  auto P1 = build_Pmu(H, 5, 3, mu);
  CHECK(std::abs(P1.m[0]) == 1);
  CHECK(P1.maslov == mu);

  // Floors disagree with mu: alpha = (2, 2), k = 7, l = 3 gives floor sum 2
  // but index difference 8, so a correction lands on the first plane.
  auto H2 = AsymQuadHamiltonian::diagonal({2.0, 2.0});
  auto [s2, m2] = sigma_and_mu(H2, 7, 3);
  CHECK(s2 == 8);
  auto P2 = build_Pmu(H2, 7, 3, m2);
  long long total = 0;
  for (long long mr : P2.m) total += mr;
  CHECK(total == m2);
  CHECK(P2.maslov == m2);
  CHECK(P2.m[0] != 1);  // the raw floor was 1 on each plane
}

TEST_CASE("re-indexed Hamiltonian: k-th power map, l-th asymptotics") {
  auto H = bumped(2.0, 0.01);
  const int k = 5, l = 3;
  auto Hkl = reindex(H, k, l);
  auto [sigma, mu] = sigma_and_mu(H, k, l);

  // (1) time-1 map equals the k-th power of the time-1 map of H.
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 0.8);
  for (int probe = 0; probe < 20; ++probe) {
    Vector z(2);
    z << gauss(rng), gauss(rng);
    Vector w = flow(AsymQuadHamiltonian::iterate(H, k), z, 1.0, 1e-10, false)
                   .endpoint;
    Vector v = flow(Hkl, z, 1.0, 1e-10, false).endpoint;
    CHECK((w - v).norm() < 1e-6);
  }

  // (2) index at infinity drops to the l-th iterate exactly.
  CHECK(index_at_infinity(Hkl).cz ==
        index_at_infinity(AsymQuadHamiltonian::iterate(H, l)).cz);

  // (2') and (3): per fixed point, index shift by sigma and action scaling.
  auto recs = find_fixed_points(AsymQuadHamiltonian::iterate(H, k),
                                SearchConfig{});
  REQUIRE(!recs.empty());
  for (const auto& rec : recs) {
    FlowResult fr = flow(Hkl, rec.z, 1.0, 1e-9, true);
    REQUIRE((fr.endpoint - rec.z).norm() < 1e-6);
    IndexReport ir = cz_index(*fr.linearization);
    CHECK(ir.cz == rec.cz - sigma);
    double aH = action(H, rec.z);
    CHECK(action(Hkl, rec.z) == doctest::Approx(k * aH).epsilon(1e-6));
  }
}

TEST_CASE("quadratic loops leave the action of fixed points unchanged") {
  auto G = bumped(0.7, 0.01);
  auto recs = find_fixed_points(G, SearchConfig{});
  REQUIRE(recs.size() == 1);
  for (long long mwind : {-2LL, 1LL, 3LL}) {
    LoopQuadratic P;
    P.m = {mwind};
    auto PG = compose(P.hamiltonian(), G);
    CHECK(std::abs(action(PG, recs[0].z) - recs[0].action) < 1e-6);
  }
}

TEST_CASE("outer interpolation radius formula") {
  CHECK(interpolation_outer_radius(2.0, 1.0, 0.8) ==
        doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
  CHECK(interpolation_outer_radius(3.0, 2.0, 0.0) == 3.0);
  CHECK_THROWS_AS(interpolation_outer_radius(0.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("homotopy profile invariants") {
  auto H = AsymQuadHamiltonian::diagonal({1.0});
  const int k = 7, l = 1;
  auto prof = nonresonant_homotopy(H, k, l, 2.0);
  CHECK(prof.C0 > 0.0);
  CHECK(prof.C1 > 0.0);
  CHECK(prof.R1 ==
        doctest::Approx(std::exp(5.0 * prof.C1 / (4.0 * prof.C0)) * prof.R0)
            .epsilon(1e-9));
  for (double b : prof.beta) CHECK(std::abs(b) < kTwoPi);

  // chi: zero/one at the ends, nondecreasing, capped slope, unit integral.
  const auto& knots = prof.chi_knots;
  REQUIRE(knots.size() >= 3);
  CHECK(knots.front()[1] == doctest::Approx(0.0));
  CHECK(knots.back()[1] == doctest::Approx(1.0).epsilon(1e-6));
  double integral = 0.0;
  for (size_t i = 1; i < knots.size(); ++i) {
    CHECK(knots[i][1] + 1e-12 >= knots[i - 1][1]);
    integral += 0.5 * (knots[i][2] + knots[i - 1][2]) *
                (knots[i][0] - knots[i - 1][0]);
    double cap_ratio = knots[i][2] * prof.C1 * knots[i][0] / prof.C0;
    CHECK(cap_ratio <= 1.0 + 1e-9);
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));

  // The endpoint family stays away from resonance on a fine grid.
  for (int i = 0; i <= 100; ++i) {
    double s = i / 100.0;
    for (size_t r = 0; r < prof.beta.size(); ++r) {
      double theta = (1.0 - s) * prof.beta[r] + l * prof.alpha[r];
      CHECK(std::abs(std::sin(0.5 * theta)) > 1e-9);
    }
  }
}

TEST_CASE("interpolation Hamiltonian conserves the radius and adds no orbits") {
  auto H = AsymQuadHamiltonian::diagonal({1.0});
  const int k = 7, l = 1;
  auto prof = nonresonant_homotopy(H, k, l, 2.0);
  auto K = build_K(prof);

  // Norm conservation along the flow from |z| = 3 (inside the ramp region).
  Vector z0(2);
  z0 << 3.0, 0.0;
  auto fr = flow(K, z0, 1.0, 1e-10, false);
  double drift = 0.0;
  for (const auto& [t, z] : fr.trajectory) {
    drift = std::max(drift, std::abs(z.norm() - 3.0));
  }
  CHECK(drift < 1e-8);

  // Also from a radius in the plateau region.
  Vector z1(2);
  z1 << 0.0, 0.5 * (prof.R0 + prof.R1);
  auto fr1 = flow(K, z1, 1.0, 1e-10, false);
  for (const auto& [t, z] : fr1.trajectory) {
    CHECK(std::abs(z.norm() - z1.norm()) < 1e-8);
  }

  // No 1-periodic orbit away from the origin.
  SearchConfig cfg;
  cfg.radius = 2.0 * prof.R1;
  auto recs = find_fixed_points(K, cfg);
  for (const auto& rec : recs) {
    CHECK(rec.z.norm() < prof.R0);
    CHECK(rec.z.norm() < 1e-6);
  }
}

TEST_CASE("matched pair: shared asymptotics, transported orbits, shift bound") {
  auto H = bumped(1.0, 0.01);
  const int k = 7, l = 1;
  auto pair = build_pipeline_pair(H, k, l);
  CHECK(pair.sigma == 2 * pair.mu);

  // Same quadratic generator on a time grid.
  for (int i = 0; i <= 32; ++i) {
    double t = i / 32.0;
    CHECK((pair.F.quad_A(t) - pair.G.quad_A(t)).norm() < 1e-12);
  }

  CHECK(pair.shift_measured <= pair.shift_bound);
  CHECK(pair.shift_bound ==
        doctest::Approx(4.0 * (k - l) * H.h_sup() +
                        8.0 * kPi * pair.R1 * pair.R1));

  REQUIRE(!pair.fixed_points.empty());
  for (const auto& fp : pair.fixed_points) {
    CHECK(fp.residual_F < 1e-6);
    CHECK(fp.cz_F == fp.cz_k - pair.sigma);
    CHECK(fp.action_F == doctest::Approx(fp.action_k).epsilon(1e-6));
    // action of the k-th iterate record is k x the base action
    double aH = action(H, fp.z);
    CHECK(fp.action_k == doctest::Approx(k * aH).epsilon(1e-6));
  }

  // The multistart on F sees exactly the transported fixed points.
  SearchConfig cfg;
  cfg.radius = 2.0 * pair.R1;
  auto recsF = find_fixed_points(pair.F, cfg);
  CHECK(recsF.size() == pair.fixed_points.size());
  for (const auto& rec : recsF) {
    double best = 1e9;
    for (const auto& fp : pair.fixed_points) {
      best = std::min(best, (rec.z - fp.z).norm());
    }
    CHECK(best < 1e-5);
  }

  // Explicit undersized radius is rejected.
  CHECK_THROWS_AS(build_pipeline_pair(H, k, l, 1e-4), ValidationError);
}

TEST_CASE("shift bound holds across iterate gaps") {
  // Angle close to pi/2 keeps the residual rotation small for gaps 4 and 8,
  // so the outer radius stays moderate for both runs.
  auto H = bumped(0.98 * kPi / 2.0, 0.01);
  const int l = 1;
  double prev_bound = 0.0;
  for (int gap : {4, 8}) {
    auto pair = build_pipeline_pair(H, l + gap, l);
    CHECK(pair.shift_measured <= pair.shift_bound);
    CHECK(pair.shift_bound > prev_bound);
    prev_bound = pair.shift_bound;
  }
}
