#include "symplab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace symplab {

namespace {
int half_dim(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() < 2 || M.rows() % 2 != 0) {
    throw ValidationError("matrix must be square of even dimension 2n");
  }
  return static_cast<int>(M.rows()) / 2;
}
}  // namespace

Matrix standard_J(int n) {
  if (n < 1) throw ValidationError("standard_J: n >= 1 required");
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -Matrix::Identity(n, n);
  J.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return J;
}

double symplectic_defect(const Matrix& M) {
  int n = half_dim(M);
  Matrix J = standard_J(n);
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Matrix& M, double tol) {
  if (tol <= 0) throw ValidationError("is_symplectic: tol > 0 required");
  if (M.rows() != M.cols() || M.rows() % 2 != 0) return false;
  if (!M.allFinite()) return false;
  return symplectic_defect(M) <= tol;
}

SymmetricGenerator unitary_log(const Matrix& U) {
  int n = half_dim(U);
  Matrix J = standard_J(n);
  double ortho = (U.transpose() * U - Matrix::Identity(2 * n, 2 * n))
                     .cwiseAbs()
                     .maxCoeff();
  double commute = (U * J - J * U).cwiseAbs().maxCoeff();
  if (ortho > 1e-8 || commute > 1e-8) {
    throw ValidationError("unitary_log: input is not unitary-as-symplectic");
  }
  // Complex form Uc = X + iY, unitary n x n; principal log via the complex
  // eigendecomposition, with the angle-pi branch pinned to +pi.
  Matrix X = U.topLeftCorner(n, n);
  Matrix Y = U.bottomLeftCorner(n, n);
  Eigen::MatrixXcd Uc = X.cast<std::complex<double>>() +
                        std::complex<double>(0, 1) * Y.cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Uc);
  if (es.info() != Eigen::Success) {
    throw NumericalError("unitary_log: eigensolver failed");
  }
  // Uc is normal up to rounding, so eigenvectors can be orthonormalized.
  Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXcd logs(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    double ang = std::arg(lam);           // in (-pi, pi]
    if (ang <= -kPi + 1e-15) ang = kPi;   // branch choice: -pi -> +pi
    logs(i) = std::complex<double>(0.0, ang);
  }
  // b = Q diag(logs) Q* in u(n);  flow convention exp(-t J0 B) with J0 ~ i
  // means U = exp(i Theta) with Theta = -B-complex, so B-complex = -Im-part.
  Eigen::MatrixXcd b = Q * logs.asDiagonal() * Q.adjoint();
  // B (real, symmetric on R^{2n}) for which -J0 B realifies b = i*H, H
  // Hermitian: b = log Uc; Uc = exp(-i Hq) with Hq Hermitian => Hq = i*b.
  Eigen::MatrixXcd Hq = std::complex<double>(0, 1) * b;  // Hermitian
  Matrix Hr = Hq.real();
  Matrix Hi = Hq.imag();
  // Quadratic form of the Hermitian matrix Hq on R^{2n}: <Hq z, z>_C real part
  // realifies to B = [[Re, -Im],[Im, Re]] symmetric.
  Matrix B(2 * n, 2 * n);
  B.topLeftCorner(n, n) = Hr;
  B.topRightCorner(n, n) = -Hi;
  B.bottomLeftCorner(n, n) = Hi;
  B.bottomRightCorner(n, n) = Hr;
  B = Matrix(0.5 * (B + B.transpose().eval()));
  return SymmetricGenerator{B};
}

CircleSpectrum circle_spectrum(const Matrix& M, double tol) {
  half_dim(M);
  if (!M.allFinite()) throw ValidationError("circle_spectrum: non-finite input");
  Eigen::EigenSolver<Matrix> es(M);
  if (es.info() != Eigen::Success) {
    throw NumericalError("circle_spectrum: eigensolver failed to converge");
  }
  CircleSpectrum out;
  out.tolerance = tol;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(std::abs(lam) - 1.0) <= tol) {
      double ang = std::arg(lam);
      if (ang <= -kPi + 1e-15) ang = kPi;
      out.angles.push_back(ang);
      out.distance_to_one = std::min(out.distance_to_one, std::abs(lam - 1.0));
    }
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

Matrix polar_factor(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::complex<double> complex_determinant(const Matrix& U) {
  int n = half_dim(U);
  Matrix X = U.topLeftCorner(n, n);
  Matrix Y = U.bottomLeftCorner(n, n);
  Eigen::MatrixXcd Uc = X.cast<std::complex<double>>() +
                        std::complex<double>(0, 1) * Y.cast<std::complex<double>>();
  return Uc.determinant();
}

Matrix block_rotation(const std::vector<double>& theta) {
  int n = static_cast<int>(theta.size());
  Matrix R = Matrix::Zero(2 * n, 2 * n);
  for (int r = 0; r < n; ++r) {
    double c = std::cos(theta[r]), s = std::sin(theta[r]);
    // exp(-theta J) on the (x_r, y_r) plane: x' = c x + s y, y' = -s x + c y
    R(r, r) = c;
    R(r, n + r) = s;
    R(n + r, r) = -s;
    R(n + r, n + r) = c;
  }
  return R;
}

Matrix symplectic_power(const Matrix& M, long long k) {
  int n = half_dim(M);
  if (k < 0) throw ValidationError("symplectic_power: k >= 0 required");
  Matrix acc = Matrix::Identity(2 * n, 2 * n);
  Matrix base = M;
  long long e = k;
  auto renorm = [&](Matrix& W) {
    // Renormalize drifted powers through the orthogonal polar projection.
    // The spot-check context is unitary-as-symplectic matrices, where the
    // rounding drift is a departure from orthogonality and the projection
    // restores it without moving the rotation angles.
    if (symplectic_defect(W) > 1e-6) W = polar_factor(W);
  };
  while (e > 0) {
    if (e & 1) {
      acc = acc * base;
      renorm(acc);
    }
    base = base * base;
    renorm(base);
    e >>= 1;
  }
  return acc;
}

Matrix real_log(const Matrix& M) { return M.log(); }

Matrix real_exp(const Matrix& M) { return M.exp(); }

std::vector<double> krein_signed_rates(const Matrix& L, double im_tol) {
  int n = half_dim(L);
  Matrix J = standard_J(n);
  Eigen::EigenSolver<Matrix> es(L);
  if (es.info() != Eigen::Success) {
    throw NumericalError("krein_signed_rates: eigensolver failed");
  }
  // An inexact L (e.g. the log of a numerically integrated monodromy) pushes
  // elliptic eigenvalues slightly off the imaginary axis; accept real parts
  // up to the scale of the symplectic defect of L. Misreading a borderline
  // loxodromic quadruple this way is harmless: its two pairs carry opposite
  // Krein signs and their index contributions cancel.
  double defect = (L.transpose() * J + J * L).norm();
  double ax_tol = std::max(im_tol, 10.0 * defect);
  std::vector<double> rates;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    if (lam.imag() <= im_tol) continue;              // keep one of each pair
    if (std::abs(lam.real()) > ax_tol * std::max(1.0, std::abs(lam)))
      continue;                                      // off the imaginary axis
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    std::complex<double> form = v.adjoint() * (J.cast<std::complex<double>>() * v);
    double im = form.imag();
    if (std::abs(im) < 1e-10 * v.squaredNorm()) {
      throw NumericalError("krein_signed_rates: near-singular Krein form");
    }
    rates.push_back((im > 0 ? -1.0 : 1.0) * lam.imag());
  }
  std::sort(rates.begin(), rates.end());
  return rates;
}

}  // namespace symplab
