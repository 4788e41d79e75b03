#include "symplab/path.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace symplab {

namespace {

// Principal argument difference arg(b) - arg(a) in (-pi, pi].
double arg_increment(const std::complex<double>& a,
                     const std::complex<double>& b) {
  return std::arg(b / a);
}

std::complex<double> polar_det(const Matrix& M) {
  return complex_determinant(polar_factor(M));
}

// Adaptive winding of w = -arg det_C(polar(.)) between two path points
// joined by the geodesic segment s -> Ma * exp(s * L), L = log(Ma^{-1} Mb).
double segment_winding(const Matrix& Ma, const std::complex<double>& da,
                       const Matrix& Mb, const std::complex<double>& db,
                       int depth) {
  double inc = arg_increment(da, db);
  if (std::abs(inc) < kPi / 2.0) return -inc;
  if (depth > 48) {
    throw NumericalError(
        "refinement-needed: winding jump > pi/2 could not be resolved by "
        "bisection (sample density insufficient)");
  }
  Matrix L = (Ma.inverse() * Mb).log();
  Matrix Mm = Ma * (0.5 * L).exp();
  std::complex<double> dm = polar_det(Mm);
  return segment_winding(Ma, da, Mm, dm, depth + 1) +
         segment_winding(Mm, dm, Mb, db, depth + 1);
}

}  // namespace

double SymplecticPath::endpoint_margin() const {
  const Matrix& W = samples.back();
  return std::abs((W - Matrix::Identity(W.rows(), W.cols())).determinant());
}

Matrix SymplecticPath::eval(double t) const {
  if (t <= times.front()) return samples.front();
  if (t >= times.back()) return samples.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  double h = times[i + 1] - times[i];
  double tau = (t - times[i]) / h;
  if (tau <= 0.0) return samples[i];
  if (tau >= 1.0) return samples[i + 1];
  Matrix L = (samples[i].inverse() * samples[i + 1]).log();
  return samples[i] * (tau * L).exp();
}

Matrix SymplecticPath::eval_extended(double t) const {
  if (t <= 1.0) return eval(t);
  double j = std::floor(t);
  double frac = t - j;
  if (frac < 1e-15) {
    j -= 1.0;
    frac = 1.0;
  }
  return eval(frac) * symplectic_power(samples.back(), static_cast<long long>(j));
}

void SymplecticPath::validate() const {
  if (n < 1) throw ValidationError("path: n >= 1 required");
  if (times.size() != samples.size() || times.size() < 2) {
    throw ValidationError("path: need matching times/samples, at least two");
  }
  if (std::abs(times.front()) > 1e-12) {
    throw ValidationError("path: first sample must be at t = 0");
  }
  if ((samples.front() - Matrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() >
      1e-9) {
    throw ValidationError("path: M(0) must be the identity");
  }
  for (size_t i = 0; i + 1 < times.size(); ++i) {
    if (times[i + 1] <= times[i]) {
      throw ValidationError("path: times must be strictly increasing");
    }
  }
  for (const Matrix& M : samples) {
    if (!is_symplectic(M, 1e-6)) {
      throw ValidationError("path: sample fails is_symplectic at tol 1e-6");
    }
  }
}

SymplecticPath path_from_diagonal(const std::vector<double>& angles,
                                  int min_samples) {
  int n = static_cast<int>(angles.size());
  if (n < 1) throw ValidationError("path_from_diagonal: empty angle list");
  double amax = 0.0;
  for (double a : angles) amax = std::max(amax, std::abs(a));
  int N = std::max(min_samples, static_cast<int>(std::ceil(8.0 * amax / kPi)));
  SymplecticPath p;
  p.n = n;
  p.diagonal_angles = angles;
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  for (int r = 0; r < n; ++r) {
    A(r, r) = angles[r];
    A(n + r, n + r) = angles[r];
  }
  p.generator = [A](double) { return A; };
  p.times.reserve(N + 1);
  p.samples.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = static_cast<double>(i) / N;
    std::vector<double> th(angles);
    for (double& a : th) a *= t;
    p.times.push_back(t);
    p.samples.push_back(block_rotation(th));
  }
  return p;
}

SymplecticPath path_from_constant_generator(const Matrix& A, int min_samples) {
  int n = static_cast<int>(A.rows()) / 2;
  Matrix L = -standard_J(n) * A;
  double scale = L.norm();
  int N = std::max(min_samples, static_cast<int>(std::ceil(8.0 * scale / kPi)));
  SymplecticPath p;
  p.n = n;
  p.generator = [A](double) { return A; };
  for (int i = 0; i <= N; ++i) {
    double t = static_cast<double>(i) / N;
    p.times.push_back(t);
    p.samples.push_back((t * L).exp());
  }
  return p;
}

SymplecticPath iterate_path(const SymplecticPath& path, int k) {
  if (k < 1) throw ValidationError("iterate_path: k >= 1 required");
  if (k == 1) return path;
  SymplecticPath out;
  out.n = path.n;
  if (path.diagonal_angles) {
    std::vector<double> scaled(*path.diagonal_angles);
    for (double& a : scaled) a *= k;
    out.diagonal_angles = scaled;
  }
  if (path.generator) {
    auto base = path.generator;
    out.generator = [base, k](double t) {
      double u = k * t;
      u -= std::floor(u);
      return static_cast<double>(k) * base(u);
    };
  }
  const Matrix& W = path.samples.back();
  Matrix Wj = Matrix::Identity(2 * path.n, 2 * path.n);
  for (int j = 0; j < k; ++j) {
    size_t start = (j == 0) ? 0 : 1;  // skip duplicated segment start
    for (size_t i = start; i < path.times.size(); ++i) {
      out.times.push_back((j + path.times[i]) / k);
      out.samples.push_back(path.samples[i] * Wj);
    }
    Wj = W * Wj;
  }
  return out;
}

SymplecticPath pointwise_product(const SymplecticPath& P,
                                 const SymplecticPath& Q) {
  if (P.n != Q.n) throw ValidationError("pointwise_product: dimension mismatch");
  std::vector<double> grid(P.times);
  grid.insert(grid.end(), Q.times.begin(), Q.times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             grid.end());
  SymplecticPath out;
  out.n = P.n;
  if (P.diagonal_angles && Q.diagonal_angles) {
    std::vector<double> sum(*P.diagonal_angles);
    for (size_t r = 0; r < sum.size(); ++r) sum[r] += (*Q.diagonal_angles)[r];
    out.diagonal_angles = sum;
  }
  for (double t : grid) {
    out.times.push_back(t);
    out.samples.push_back(P.eval(t) * Q.eval(t));
  }
  return out;
}

SymplecticPath end_perturbed(const SymplecticPath& path, double eps) {
  // Resample so the ramp region [0.8, 1] carries enough points.
  std::vector<double> grid(path.times);
  for (int i = 0; i <= 64; ++i) grid.push_back(0.8 + 0.2 * i / 64.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             grid.end());
  SymplecticPath out;
  out.n = path.n;
  for (double t : grid) {
    double eta = smoothstep((t - 0.8) / 0.2);
    std::vector<double> th(path.n, eps * eta);
    out.times.push_back(t);
    out.samples.push_back(path.eval(t) * block_rotation(th));
  }
  return out;
}

double polar_winding(const SymplecticPath& path) {
  double total = 0.0;
  std::complex<double> prev = polar_det(path.samples.front());
  for (size_t i = 0; i + 1 < path.samples.size(); ++i) {
    std::complex<double> next = polar_det(path.samples[i + 1]);
    total += segment_winding(path.samples[i], prev, path.samples[i + 1], next, 0);
    prev = next;
  }
  return total;
}

double polar_winding_exp(const Matrix& L) {
  double scale = L.norm();
  int N = std::max(16, static_cast<int>(std::ceil(8.0 * scale / kPi)));
  double total = 0.0;
  Matrix prev_M = Matrix::Identity(L.rows(), L.cols());
  std::complex<double> prev = polar_det(prev_M);
  for (int i = 1; i <= N; ++i) {
    Matrix M = (static_cast<double>(i) / N * L).exp();
    std::complex<double> d = polar_det(M);
    total += segment_winding(prev_M, prev, M, d, 0);
    prev_M = M;
    prev = d;
  }
  return total;
}

}  // namespace symplab
