#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symplab/flow.hpp"
#include "symplab/hamiltonian.hpp"
#include "symplab/linalg.hpp"

using namespace symplab;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

AsymQuadHamiltonian sample_ham(std::mt19937& rng, int n = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> angles(n);
  for (double& a : angles) a = 2.0 * u(rng) + 1.5;
  std::vector<Bump> bumps;
  for (int i = 0; i < 2; ++i) {
    Bump b;
    b.center = Vector::Zero(2 * n);
    for (int j = 0; j < 2 * n; ++j) b.center[j] = 0.8 * u(rng);
    b.width = 0.5 + 0.3 * std::abs(u(rng));
    b.coeff.c0 = 0.3 * u(rng);
    b.coeff.cos_c = {0.2 * u(rng)};
    b.coeff.sin_c = {0.2 * u(rng)};
    bumps.push_back(b);
  }
  return AsymQuadHamiltonian::diagonal(angles, bumps);
}

}  // namespace

TEST_CASE("quadratic flow matches the matrix exponential") {
  auto H = AsymQuadHamiltonian::quad_diag({1.7});
  Vector z0 = vec2(0.8, -0.4);
  FlowResult fr = flow(H, z0, 1.0, 1e-10, true);
  Matrix R = block_rotation({1.7});
  CHECK((fr.endpoint - R * z0).norm() < 1e-9);
  CHECK((fr.linearization->endpoint() - R).norm() < 1e-9);
  REQUIRE(fr.linearization->diagonal_angles.has_value());
  for (const Matrix& M : fr.linearization->samples) CHECK(is_symplectic(M, 1e-8));
}

TEST_CASE("zero Hamiltonian flows to the identity") {
  auto H = AsymQuadHamiltonian::zero(2);
  Vector z0(4);
  z0 << 1.0, -2.0, 0.5, 0.25;
  FlowResult fr = flow(H, z0, 1.0, 1e-9, true);
  CHECK((fr.endpoint - z0).norm() < 1e-12);
  CHECK((fr.linearization->endpoint() - Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("a far-away bump does not disturb the orbit") {
  Bump b;
  b.center = vec2(50.0, 0.0);
  b.width = 0.3;
  b.coeff.c0 = 1.0;
  auto H = AsymQuadHamiltonian::diagonal({1.3}, {b});
  auto Q = AsymQuadHamiltonian::quad_diag({1.3});
  Vector z0 = vec2(1.0, 0.0);
  CHECK((flow(H, z0, 1.0, 1e-10, false).endpoint -
         flow(Q, z0, 1.0, 1e-10, false).endpoint)
            .norm() < 1e-6);
}

TEST_CASE("energy conservation for autonomous Hamiltonians") {
  Bump b;
  b.center = vec2(0.5, 0.2);
  b.width = 0.7;
  b.coeff.c0 = 0.4;
  auto H = AsymQuadHamiltonian::diagonal({2.1}, {b});
  Vector z0 = vec2(0.9, -0.3);
  FlowResult fr = flow(H, z0, 1.0, 1e-9, false);
  double e0 = H.impl()->value(0.0, z0);
  for (const auto& [t, z] : fr.trajectory) {
    CHECK(std::abs(H.impl()->value(0.0, z) - e0) < 1e-8);
  }
}

TEST_CASE("linearization samples are symplectic for bumpy flows") {
  std::mt19937 rng(3);
  for (int rep = 0; rep < 3; ++rep) {
    auto H = sample_ham(rng);
    Vector z0 = vec2(0.3 + 0.1 * rep, -0.2);
    FlowResult fr = flow(H, z0, 1.0, 1e-9, true);
    for (const Matrix& M : fr.linearization->samples) {
      CHECK(is_symplectic(M, 1e-8));
    }
  }
}

TEST_CASE("iterate flows equal repeated flows") {
  std::mt19937 rng(4);
  auto H = sample_ham(rng);
  for (int k : {2, 3, 7}) {
    auto Hk = AsymQuadHamiltonian::iterate(H, k);
    Vector z0 = vec2(0.4, 0.1);
    Vector direct = flow(Hk, z0, 1.0, 1e-10, false).endpoint;
    Vector chained = z0;
    for (int j = 0; j < k; ++j) {
      chained = flow(H, chained, 1.0, 1e-10, false).endpoint;
    }
    CHECK((direct - chained).norm() < k * 1e-8);
  }
}

TEST_CASE("concatenation endpoint identity") {
  std::mt19937 rng(5);
  auto F = sample_ham(rng);
  auto G = sample_ham(rng);
  auto FG = AsymQuadHamiltonian::concat(F, G);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 0; p < 20; ++p) {
    Vector z0 = vec2(u(rng), u(rng));
    Vector lhs = flow(FG, z0, 1.0, 1e-10, false).endpoint;
    Vector rhs =
        flow(F, flow(G, z0, 1.0, 1e-10, false).endpoint, 1.0, 1e-10, false)
            .endpoint;
    CHECK((lhs - rhs).norm() < 1e-6);
  }
}

TEST_CASE("compose with zero and with the reverse") {
  std::mt19937 rng(6);
  auto F = sample_ham(rng);
  auto Z = AsymQuadHamiltonian::zero(1);

  auto FZ = compose(F, Z);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 0; p < 5; ++p) {
    Vector z0 = vec2(u(rng), u(rng));
    CHECK((flow(FZ, z0, 1.0, 1e-8, false).endpoint -
           flow(F, z0, 1.0, 1e-10, false).endpoint)
              .norm() < 1e-6);
  }

  auto FRF = compose(F, reverse(F));
  for (double t : {0.25, 0.5, 1.0}) {
    Vector z0 = vec2(0.3, -0.5);
    CHECK((flow(FRF, z0, t, 1e-8, false).endpoint - z0).norm() < 1e-6);
  }
}

TEST_CASE("flow-defined composes reject closed-form-only queries") {
  std::mt19937 rng(7);
  auto F = sample_ham(rng);
  auto C = compose(F, F);
  CHECK(C.impl()->flow_defined());
  CHECK_THROWS_AS(C.impl()->h_sup(), ValidationError);
}

TEST_CASE("action of the trivial orbit of a quadratic flow is zero") {
  auto H = AsymQuadHamiltonian::quad_diag({2.0, -1.0});
  CHECK(std::abs(action(H, Vector::Zero(4))) < 1e-10);
}

TEST_CASE("action drops by an added constant coefficient") {
  Bump b;
  b.center = vec2(0.0, 0.0);
  b.width = 1.0;
  b.coeff.c0 = 0.35;
  auto H = AsymQuadHamiltonian::diagonal({2.2}, {b});
  // The origin stays fixed (the bump gradient vanishes there).
  double a0 = action(H, Vector::Zero(2));
  // Add a constant c: with the bump centered at the fixed point with width-1
  // Gaussian equal to 1 there, H(z*) rises by c, so the action drops by c.
  Bump b2 = b;
  b2.coeff.c0 += 0.25;
  auto H2 = AsymQuadHamiltonian::diagonal({2.2}, {b2});
  double a1 = action(H2, Vector::Zero(2));
  CHECK(a1 == doctest::Approx(a0 - 0.25).epsilon(1e-8));
}

TEST_CASE("action adds under concatenation at a common fixed point") {
  Bump b;
  b.center = vec2(0.0, 0.0);
  b.width = 0.8;
  b.coeff.c0 = 0.3;
  b.coeff.cos_c = {0.1};
  auto F = AsymQuadHamiltonian::diagonal({1.9}, {b});
  Bump b2 = b;
  b2.coeff.c0 = -0.2;
  auto G = AsymQuadHamiltonian::diagonal({0.7}, {b2});
  auto FG = AsymQuadHamiltonian::concat(F, G);
  Vector z0 = Vector::Zero(2);
  CHECK(action(FG, z0) ==
        doctest::Approx(action(F, z0) + action(G, z0)).epsilon(1e-7));
}

TEST_CASE("linear map at infinity and sublinearity ratios") {
  auto Q = AsymQuadHamiltonian::quad_diag({1.1});
  auto r0 = sublinearity_diagnostic(Q, {2.0, 5.0});
  for (double r : r0) CHECK(r < 1e-8);

  Bump b;
  b.center = vec2(0.0, 0.0);
  b.width = 1.0;
  b.coeff.c0 = 0.5;
  auto H = AsymQuadHamiltonian::diagonal({1.1}, {b});
  auto ratios = sublinearity_diagnostic(H, {5.0, 10.0, 20.0, 40.0});
  for (size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] < ratios[i - 1]);
  CHECK(ratios.back() < 1e-6);
}

TEST_CASE("nondegeneracy certificate, diagonal closed form") {
  auto H = AsymQuadHamiltonian::quad_diag({kPi});
  NondegeneracyCertificate c = nondegeneracy_certificate(H);
  CHECK(c.nu == doctest::Approx(kPi));
  CHECK(c.method == "diagonal_closed_form");

  auto H2 = AsymQuadHamiltonian::quad_diag({kTwoPi - 1e-3});
  CHECK(nondegeneracy_certificate(H2).nu == doctest::Approx(1e-3).epsilon(1e-6));

  auto H3 = AsymQuadHamiltonian::quad_diag({kTwoPi});
  CHECK_THROWS_AS(nondegeneracy_certificate(H3), ValidationError);
}

TEST_CASE("discretized operator nu matches the diagonal formula") {
  // Same quadratic fed through the general (sampled) representation.
  for (double a : {kPi, 2.0, kTwoPi - 1e-3}) {
    Matrix A = Matrix::Identity(2, 2) * a;
    auto Hg = AsymQuadHamiltonian::general({A}, {});
    auto Hd = AsymQuadHamiltonian::quad_diag({a});
    NondegeneracyCertificate cg = nondegeneracy_certificate(Hg);
    NondegeneracyCertificate cd = nondegeneracy_certificate(Hd);
    CHECK(cg.method == "discretized_operator");
    CHECK(cg.nu == doctest::Approx(cd.nu).epsilon(1e-4));
  }
}

TEST_CASE("certificate radius bounds orbits of a bumpy flow") {
  Bump b;
  b.center = vec2(0.4, 0.1);
  b.width = 0.6;
  b.coeff.c0 = 0.2;
  auto H = AsymQuadHamiltonian::diagonal({2.3}, {b});
  NondegeneracyCertificate c = nondegeneracy_certificate(H);
  CHECK(c.nu > 0.0);
  CHECK(c.delta > 0.0);
  CHECK(c.apriori_radius > 0.0);
  // The origin-region fixed point of this flow lies well within the ball.
  CHECK(c.apriori_radius > 0.05);
}

TEST_CASE("index at infinity: degenerate and iterated") {
  auto Hdeg = AsymQuadHamiltonian::quad_diag({kTwoPi});
  CHECK_THROWS_AS(index_at_infinity(Hdeg), ValidationError);

  auto H = AsymQuadHamiltonian::quad_diag({2.0});
  IndexReport r1 = index_at_infinity(H);
  CHECK(r1.cz == 1);
  CHECK(r1.mean == doctest::Approx(2.0 / kPi));

  IndexReport r3 = index_at_infinity(AsymQuadHamiltonian::iterate(H, 3));
  IndexReport r5 = index_at_infinity(AsymQuadHamiltonian::iterate(H, 5));
  // closed form: 2 floor(k*2/2pi) + 1.
  CHECK(r3.cz == 2 * static_cast<long long>(std::floor(6.0 / kTwoPi)) + 1);
  CHECK(r5.cz == 2 * static_cast<long long>(std::floor(10.0 / kTwoPi)) + 1);
  CHECK(std::abs(r5.cz - r3.cz) == 2);
  CHECK(r5.mean == doctest::Approx(5.0 * r1.mean).epsilon(1e-12));
}

TEST_CASE("radial planar Hamiltonian profile") {
  double theta0 = 1.0, theta_inf = 3.0, ua = 1.0, ub = 4.0;
  auto H = AsymQuadHamiltonian::radial(theta0, theta_inf, ua, ub);
  // Inside the inner plateau the flow is a rotation by theta0.
  Vector z0 = vec2(0.5, 0.0);
  FlowResult fr = flow(H, z0, 1.0, 1e-10, false);
  CHECK((fr.endpoint - block_rotation({theta0}) * z0).norm() < 1e-8);
  // Far outside, rotation by theta_inf.
  Vector z1 = vec2(4.0, 0.0);
  FlowResult fr1 = flow(H, z1, 1.0, 1e-10, false);
  CHECK((fr1.endpoint - block_rotation({theta_inf}) * z1).norm() < 1e-7);
  // The angular speed profile is monotone between the plateaus.
  double prev = radial_gprime(theta0, theta_inf, ua, ub, ua);
  for (int i = 1; i <= 32; ++i) {
    double u = ua + (ub - ua) * i / 32.0;
    double cur = radial_gprime(theta0, theta_inf, ua, ub, u);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
}

TEST_CASE("unitary frame preserves values along rotated points") {
  std::mt19937 rng(8);
  auto H = sample_ham(rng);
  auto W = AsymQuadHamiltonian::unitary_frame({kTwoPi}, H);
  Vector z = vec2(0.7, -0.2);
  double t = 0.37;
  Matrix R = block_rotation({kTwoPi * t});
  CHECK(W.impl()->value(t, z) ==
        doctest::Approx(H.impl()->value(t, R * z)).epsilon(1e-12));
  // Gradient chain rule.
  Vector g = W.impl()->grad(t, z);
  Vector gref = R.transpose() * H.impl()->grad(t, Vector(R * z));
  CHECK((g - gref).norm() < 1e-12);
}
