#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symplab/linalg.hpp"
#include "symplab/path.hpp"

using namespace symplab;

namespace {

Matrix random_symmetric(int d, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = g(rng);
  return 0.5 * (A + A.transpose());
}

}  // namespace

TEST_CASE("standard_J basics") {
  for (int n : {1, 2, 3}) {
    Matrix J = standard_J(n);
    CHECK((J * J + Matrix::Identity(2 * n, 2 * n)).norm() == doctest::Approx(0.0));
    CHECK((J + J.transpose()).norm() == doctest::Approx(0.0));
    CHECK(is_symplectic(J));
  }
  CHECK(standard_J(1)(0, 1) == doctest::Approx(-1.0));
  CHECK(standard_J(1)(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("block_rotation is the diagonal quadratic flow") {
  // exp(-J0 * diag(theta)) acts as e^{-i theta} per plane.
  Matrix R = block_rotation({0.7});
  CHECK(R(0, 0) == doctest::Approx(std::cos(0.7)));
  CHECK(R(0, 1) == doctest::Approx(std::sin(0.7)));
  CHECK(R(1, 0) == doctest::Approx(-std::sin(0.7)));
  CHECK(is_symplectic(R));

  Matrix A = Matrix::Identity(2, 2) * 0.7;
  Matrix E = real_exp(-standard_J(1) * A);
  CHECK((E - R).norm() < 1e-12);
}

TEST_CASE("unitary_log round-trips on random unitaries") {
  std::mt19937 rng(7);
  for (int n : {1, 2, 3}) {
    for (int rep = 0; rep < 20; ++rep) {
      Matrix B = random_symmetric(2 * n, rng);
      // Symmetrize into the unitary Lie algebra: commute with J0.
      Matrix J = standard_J(n);
      B = 0.5 * (B - J * B * J.transpose() * (-1.0));
      B = Matrix(0.5 * (B + B.transpose().eval()));
      // Project properly: B unitary-generator iff J B = B J.
      B = 0.5 * (B + J.transpose() * B * J);
      Matrix U = real_exp(Matrix(-J * B));
      Matrix Bl = unitary_log(U).B;
      Matrix U2 = real_exp(Matrix(-J * Bl));
      CHECK((U - U2).norm() < 1e-9);
      CHECK((Bl - Bl.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("circle_spectrum on a rotation") {
  Matrix R = block_rotation({1.3, 2.9});
  CircleSpectrum cs = circle_spectrum(R);
  CHECK(cs.distance_to_one > 0.5);
  Matrix I4 = Matrix::Identity(4, 4);
  CHECK(circle_spectrum(I4).distance_to_one == doctest::Approx(0.0));
}

TEST_CASE("polar factor of near-unitary matrix") {
  Matrix R = block_rotation({0.4});
  Matrix S = (Matrix(2, 2) << 1.2, 0.1, 0.1, 0.9).finished();
  Matrix U = polar_factor(Matrix(R * S * S));  // symmetric positive factor drops
  CHECK((U * U.transpose() - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("complex determinant winding of a plane rotation") {
  // det_C of block_rotation(theta) = e^{-i theta}.
  Matrix R = block_rotation({0.4});
  auto det = complex_determinant(R);
  CHECK(std::abs(det - std::polar(1.0, -0.4)) < 1e-12);
}

TEST_CASE("path_from_diagonal endpoints and winding") {
  SymplecticPath P = path_from_diagonal({1.0});
  CHECK(P.n == 1);
  CHECK((P.samples.front() - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((P.endpoint() - block_rotation({1.0})).norm() < 1e-10);
  // w(t) = -arg det_C = +alpha t for alpha = 1.
  double w = polar_winding(P);
  CHECK(w == doctest::Approx(1.0).epsilon(1e-8));

  SymplecticPath Q = path_from_diagonal({-3.5, 9.0});
  double w2 = polar_winding(Q);
  CHECK(w2 == doctest::Approx(5.5).epsilon(1e-8));
}

TEST_CASE("iterate_path multiplies the winding and chains endpoints") {
  SymplecticPath P = path_from_diagonal({2.0});
  for (int k : {2, 3, 7}) {
    SymplecticPath Pk = iterate_path(P, k);
    CHECK((Pk.endpoint() - symplectic_power(P.endpoint(), k)).norm() < 1e-8);
    CHECK(polar_winding(Pk) == doctest::Approx(2.0 * k).epsilon(1e-7));
    REQUIRE(Pk.diagonal_angles.has_value());
    CHECK((*Pk.diagonal_angles)[0] == doctest::Approx(2.0 * k));
  }
}

TEST_CASE("constant-generator path matches matrix exponential") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 1 + rep % 3;
    Matrix A = random_symmetric(2 * n, rng, 0.5);
    SymplecticPath P = path_from_constant_generator(A);
    Matrix E = real_exp(Matrix(-standard_J(n) * A));
    CHECK((P.endpoint() - E).norm() < 1e-9);
    for (const Matrix& M : P.samples) CHECK(is_symplectic(M, 1e-8));
  }
}

TEST_CASE("pointwise product sums windings") {
  SymplecticPath P = path_from_diagonal({1.5});
  SymplecticPath Q = path_from_diagonal({-0.5});
  SymplecticPath PQ = pointwise_product(P, Q);
  CHECK(polar_winding(PQ) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("krein signs of diagonal rotation generators") {
  // L = -J0 * diag(alpha) has eigenvalues +-i alpha; signed rate = +alpha.
  Matrix A = Matrix::Identity(2, 2) * 1.3;
  Matrix L = -standard_J(1) * A;
  auto rates = krein_signed_rates(L);
  REQUIRE(rates.size() == 1);
  CHECK(rates[0] == doctest::Approx(1.3).epsilon(1e-10));

  Matrix A2 = Matrix::Identity(2, 2) * (-0.8);
  auto rates2 = krein_signed_rates(Matrix(-standard_J(1) * A2));
  REQUIRE(rates2.size() == 1);
  CHECK(rates2[0] == doctest::Approx(-0.8).epsilon(1e-10));
}
