// Symplectic and unitary linear algebra over R^{2n}: the standard structure
// J0, membership tests, unit-circle spectra, principal logarithms of unitary
// symplectic matrices, polar factors and their complex determinants.
//
// Coordinate convention: z = (x_1..x_n, y_1..y_n) in block layout, so
// J0 = [[0, -I_n],[I_n, 0]] and the complex identification is
// z_r = x_r + i y_r with J0 acting as multiplication by i.
#pragma once

#include <complex>
#include <limits>

#include "symplab/common.hpp"

namespace symplab {

// Unit-circle spectrum of a real 2n x 2n matrix.
struct CircleSpectrum {
  std::vector<double> angles;  // radians in (-pi, pi], sorted, with multiplicity
  double tolerance = 1e-8;     // how far ||lambda|-1| may deviate
  // min over unit-circle eigenvalues of |lambda - 1| (chord metric);
  // +infinity when there is no unit-circle eigenvalue.
  double distance_to_one = std::numeric_limits<double>::infinity();
};

// Symmetric generator B of a quadratic Hamiltonian Q(z) = 1/2 <Bz, z>,
// whose linear flow is exp(-t J0 B).
struct SymmetricGenerator {
  Matrix B;
};

// The standard symplectic structure [[0, -I_n],[I_n, 0]].
Matrix standard_J(int n);

// True iff ||M^T J0 M - J0||_max <= tol.
bool is_symplectic(const Matrix& M, double tol = 1e-9);

// Max-norm symplectic defect ||M^T J0 M - J0||_max.
double symplectic_defect(const Matrix& M);

// Principal logarithm of a unitary-as-symplectic matrix (commutes with J0,
// orthogonal). Returns symmetric B with exp(-J0 B) = U; rotation angles of
// the log lie in (-pi, pi], angle exactly pi assigned +pi.
// Throws ValidationError on non-unitary input.
SymmetricGenerator unitary_log(const Matrix& U);

// Arguments of all eigenvalues within tol of the unit circle.
// Throws NumericalError if the eigensolver fails to converge.
CircleSpectrum circle_spectrum(const Matrix& M, double tol = 1e-8);

// Special orthogonal polar factor of an invertible matrix (via SVD):
// M = P * O with P symmetric positive definite; for symplectic M the factor
// O is unitary-as-symplectic.
Matrix polar_factor(const Matrix& M);

// Complex determinant of a unitary-as-symplectic matrix, i.e. det over C of
// X + iY where M = [[X, -Y],[Y, X]]. |result| = 1 up to rounding.
std::complex<double> complex_determinant(const Matrix& U);

// Block-diagonal rotation exp(-J0 * diag(theta)): coordinate plane r rotated
// by e^{-i theta_r} in the complex identification.
Matrix block_rotation(const std::vector<double>& theta);

// M^k by binary exponentiation; the symplectic defect is renormalized via a
// polar-type projection whenever it exceeds 1e-6 (large powers amplify
// rounding).
Matrix symplectic_power(const Matrix& M, long long k);

// Real matrix logarithm (principal branch, via Eigen's Schur-based log).
Matrix real_log(const Matrix& M);

// Matrix exponential.
Matrix real_exp(const Matrix& M);

// Eigen-decomposition helper: Krein-signed rotation rates of a Hamiltonian
// (infinitesimally symplectic) matrix L = -J0 A. For every eigenvalue pair
// +-i*s (s > 0) on the imaginary axis, the signed rate is
// sign = -sgn Im(v* J0 v) applied to s, matching the convention in which the
// generator of the planar flow e^{-i alpha t} has signed rate alpha.
// Non-imaginary eigenvalues are ignored. Throws NumericalError when a Krein
// form is too close to singular to trust the sign.
std::vector<double> krein_signed_rates(const Matrix& L, double im_tol = 1e-9);

}  // namespace symplab
