#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symplab/cz.hpp"
#include "symplab/linalg.hpp"
#include "symplab/path.hpp"

using namespace symplab;

namespace {

// Diagonal closed form used as the primary reference.
long diag_cz(const std::vector<double>& angles) {
  long s = 0;
  for (double a : angles) s += 2 * static_cast<long>(std::floor(a / kTwoPi)) + 1;
  return s;
}

double diag_mean(const std::vector<double>& angles) {
  double s = 0.0;
  for (double a : angles) s += a / kPi;
  return s;
}

Matrix random_generator(int n, std::mt19937& rng, double rot_scale,
                        double hyp_scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  int d = 2 * n;
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = hyp_scale * g(rng);
  A = Matrix(0.5 * (A + A.transpose().eval()));
  // Add a definite rotation part to keep the path interesting.
  for (int r = 0; r < n; ++r) {
    double a = rot_scale * g(rng);
    A(r, r) += a;
    A(n + r, n + r) += a;
  }
  return A;
}

}  // namespace

TEST_CASE("pinned convention: planar rotation with angle in (0, 2pi)") {
  for (double a : {0.3, 1.0, kPi, 5.0}) {
    IndexReport r = cz_index(path_from_diagonal({a}));
    CHECK(r.cz == kRotationPathIndexAlphaIn0To2Pi);
    CHECK(r.mean == doctest::Approx(a / kPi));
  }
  // The convention constant is also reproduced by the crossing oracle.
  CHECK(cz_crossing_oracle(path_from_diagonal({1.0})) ==
        kRotationPathIndexAlphaIn0To2Pi);
}

TEST_CASE("diagonal closed form across floors") {
  std::vector<std::vector<double>> cases = {
      {1.0}, {5.0}, {7.0}, {13.0}, {-1.0}, {-7.0}, {1.0, 8.0}, {-4.0, 2.5, 9.9}};
  for (const auto& angles : cases) {
    IndexReport r = cz_index(path_from_diagonal(angles));
    CHECK(r.cz == diag_cz(angles));
    CHECK(r.mean == doctest::Approx(diag_mean(angles)).epsilon(1e-12));
  }
}

TEST_CASE("winding method agrees with the closed form on rotation paths") {
  // Feed the same autonomous rotations as constant-generator paths, which
  // carry no diagonal metadata and exercise the generic winding route.
  for (double a : {1.0, 5.0, 7.0, -7.0, 13.4}) {
    Matrix A = Matrix::Identity(2, 2) * a;
    IndexReport r = cz_index(path_from_constant_generator(A));
    CHECK(r.cz == diag_cz({a}));
    CHECK(r.mean == doctest::Approx(a / kPi).epsilon(1e-9));
  }
  Matrix A2 = Matrix::Zero(4, 4);
  A2(0, 0) = A2(2, 2) = 2.2;
  A2(1, 1) = A2(3, 3) = -8.0;
  IndexReport r2 = cz_index(path_from_constant_generator(A2));
  CHECK(r2.cz == diag_cz({2.2, -8.0}));
}

TEST_CASE("hyperbolic paths have index 0 (n=1)") {
  Matrix A = (Matrix(2, 2) << 0.8, 0.0, 0.0, -0.5).finished();
  IndexReport r = cz_index(path_from_constant_generator(A));
  CHECK(r.cz == 0);
  CHECK(r.mean == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("oracle agreement on random nondegenerate paths") {
  std::mt19937 rng(42);
  int tested = 0;
  for (int rep = 0; tested < 200 && rep < 400; ++rep) {
    int n = 1 + rep % 3;
    Matrix A = random_generator(n, rng, 2.5, 0.08);
    SymplecticPath P = path_from_constant_generator(A);
    if (P.endpoint_margin() < 1e-4) continue;
    CHECK(cz_index(P).cz == cz_crossing_oracle(P));
    ++tested;
  }
  CHECK(tested >= 200);
}

TEST_CASE("loop composition formula, exact integers") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> mu_dist(-5, 5);
  std::uniform_real_distribution<double> ang(-9.0, 9.0);
  int cases = 0;
  while (cases < 200) {
    int n = 1 + cases % 3;
    std::vector<double> angles(n);
    bool ok = true;
    for (double& a : angles) {
      a = ang(rng);
      if (std::abs(a - kTwoPi * std::round(a / kTwoPi)) < 0.05) ok = false;
    }
    if (!ok) continue;
    SymplecticPath M = path_from_diagonal(angles);
    std::vector<double> loop_angles(n, 0.0);
    loop_angles[0] = kTwoPi * mu_dist(rng);
    SymplecticPath Phi = path_from_diagonal(loop_angles);
    long mu = maslov_loop(Phi);
    CHECK(mu == static_cast<long>(std::llround(loop_angles[0] / kTwoPi)));
    SymplecticPath PhiM = pointwise_product(Phi, M);
    CHECK(cz_index(PhiM).cz == cz_index(M).cz + 2 * mu);
    ++cases;
  }
}

TEST_CASE("iteration bound and mean additivity") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ang(-6.0, 6.0);
  // Diagonal paths cover all k <= 64 cheaply and exactly.
  for (int rep = 0; rep < 25; ++rep) {
    int n = 1 + rep % 2;
    std::vector<double> angles(n);
    for (double& a : angles) a = ang(rng);
    SymplecticPath P = path_from_diagonal(angles);
    double mean = mean_cz(P);
    for (int k = 1; k <= 64; ++k) {
      SymplecticPath Pk = iterate_path(P, k);
      if (Pk.endpoint_margin() < 1e-6) continue;
      IndexReport rk = cz_index(Pk);
      CHECK(std::abs(rk.cz - k * mean) <= n + 1e-9);
      CHECK(mean_cz(Pk) == doctest::Approx(k * mean).epsilon(1e-11));
    }
  }
  // A few generic constant-generator paths through the winding route.
  for (int rep = 0; rep < 8; ++rep) {
    int n = 1 + rep % 2;
    Matrix A = random_generator(n, rng, 2.0, 0.05);
    SymplecticPath P = path_from_constant_generator(A);
    if (P.endpoint_margin() < 1e-3) continue;
    double mean = mean_cz(P);
    for (int k : {1, 2, 3, 5, 8, 13, 21, 64}) {
      SymplecticPath Pk = iterate_path(P, k);
      if (Pk.endpoint_margin() < 1e-5) continue;
      IndexReport rk = cz_index(Pk);
      CHECK(std::abs(rk.cz - k * mean) <= n + 1e-6);
    }
  }
}

TEST_CASE("parity of odd iterates") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ang(-6.0, 6.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> angles = {ang(rng), ang(rng)};
    SymplecticPath P = path_from_diagonal(angles);
    for (auto [k, l] : std::vector<std::pair<int, int>>{{3, 5}, {5, 7}, {3, 11}}) {
      SymplecticPath Pk = iterate_path(P, k);
      SymplecticPath Pl = iterate_path(P, l);
      if (Pk.endpoint_margin() < 1e-6 || Pl.endpoint_margin() < 1e-6) continue;
      CHECK(((cz_index(Pk).cz - cz_index(Pl).cz) % 2) == 0);
    }
  }
}

TEST_CASE("resampling invariance") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix A = random_generator(2, rng, 2.0, 0.06);
    SymplecticPath P = path_from_constant_generator(A);
    if (P.endpoint_margin() < 1e-4) continue;
    // Rebuild at double density.
    SymplecticPath Q = path_from_constant_generator(
        A, 2 * static_cast<int>(P.times.size()));
    CHECK(cz_index(P).cz == cz_index(Q).cz);
  }
}

TEST_CASE("lsc at a degenerate endpoint (diagonal)") {
  // Angle exactly 2pi: nondegenerate cz is undefined; the lower
  // semicontinuous value is 2*1 - 1 = 1.
  IndexReport r = cz_index_lsc(path_from_diagonal({kTwoPi}));
  CHECK(r.cz == 1);
  CHECK(r.degenerate_endpoint);
  IndexReport r0 = cz_index_lsc(path_from_diagonal({0.0, 3.0}));
  CHECK(r0.cz == -1 + 1);
}

TEST_CASE("degree support interval") {
  DegreeInterval I = degree_support_interval(5.0, 2, 0);
  CHECK(I.lo == doctest::Approx(3.0));
  CHECK(I.hi == doctest::Approx(7.0));
  DegreeInterval I2 = degree_support_interval(101 * 0.8, 1, 4);
  CHECK(I2.lo == doctest::Approx(75.8).epsilon(1e-12));
  CHECK(I2.hi == doctest::Approx(77.8).epsilon(1e-12));
  CHECK(degree_support_interval(0.0, 1, 0)
            .intersects(DegreeInterval{0.5, 2.0}));
  CHECK(!degree_support_interval(0.0, 1, 0)
             .intersects(DegreeInterval{1.5, 2.0}));
}

TEST_CASE("negative-hyperbolic endpoint falls back gracefully") {
  // Generator with eigen-angles pi and a hyperbolic part: endpoint has
  // eigenvalues on the negative real axis, where no real logarithm exists.
  Matrix A = Matrix::Identity(2, 2) * kPi;
  Matrix B = (Matrix(2, 2) << 0.3, 0.0, 0.0, -0.3).finished();
  // Product path: rotation by pi then a hyperbolic stretch.
  SymplecticPath P1 = path_from_constant_generator(A);
  SymplecticPath P2 = path_from_constant_generator(B);
  // Compose in time: second path starts at P1's endpoint.
  SymplecticPath P = P1;
  Matrix E1 = P1.endpoint();
  for (size_t i = 1; i < P2.times.size(); ++i) {
    P.times.push_back(0.5 + 0.5 * P2.times[i]);
    P.samples.push_back(P2.samples[i] * E1);
  }
  for (size_t i = 0; i + 1 < P1.times.size(); ++i) P.times[i] *= 0.5;
  P.times[P1.times.size() - 1] = 0.5;
  P.diagonal_angles.reset();
  P.generator = nullptr;
  IndexReport r = cz_index(P);
  // Reference: crossing oracle on the same path.
  CHECK(r.cz == cz_crossing_oracle(P));
  CHECK(P.endpoint_margin() > 1e-6);
}
