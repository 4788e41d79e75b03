#include "symplab/cz.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace symplab {

namespace {

constexpr double kDegenerateMargin = 1e-8;

double dist_to_multiple(double x, double period) {
  double r = std::remainder(x, period);
  return std::abs(r);
}

// Principal real logarithm of a path endpoint. Throws NumericalError when the
// endpoint has (numerically) negative real eigenvalues, where no principal
// real logarithm exists; callers fall back to an end-perturbed path or to the
// crossing oracle.
Matrix endpoint_log(const Matrix& W) {
  Eigen::EigenSolver<Matrix> es(W);
  if (es.info() != Eigen::Success) {
    throw NumericalError("endpoint_log: eigensolver failed");
  }
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    if (lam.real() < 0.0 && std::abs(lam.imag()) < 1e-9 * std::abs(lam)) {
      throw NumericalError("endpoint_log: negative real eigenvalue");
    }
  }
  Matrix L = W.log();
  if (!L.allFinite() || ((L.exp() - W).cwiseAbs().maxCoeff() >
                         1e-8 * std::max(1.0, W.cwiseAbs().maxCoeff()))) {
    throw NumericalError("endpoint_log: logarithm verification failed");
  }
  return L;
}

// Closed-form index of the autonomous linear path tau -> exp(tau * L):
// per Krein-signed elliptic pair with rate s, 2*floor(s/2pi) + 1; hyperbolic
// and loxodromic pairs contribute 0.
long long autonomous_cz(const std::vector<double>& rates) {
  long long cz = 0;
  for (double s : rates) {
    cz += 2 * static_cast<long long>(std::floor(s / kTwoPi)) + 1;
  }
  return cz;
}

double autonomous_mean(const std::vector<double>& rates) {
  double m = 0.0;
  for (double s : rates) m += s / kPi;
  return m;
}

struct WindingResult {
  long long cz;
  double mean;
};

// Winding method with endpoint normalization by e(tau) = exp(tau log M(1)).
WindingResult winding_index_from(const Matrix& L, const SymplecticPath& path) {
  std::vector<double> rates = krein_signed_rates(L);
  double w_path = polar_winding(path);
  double w_ref = polar_winding_exp(L);
  double loops = (w_path - w_ref) / kTwoPi;
  long long m = std::llround(loops);
  if (std::abs(loops - m) > 0.05) {
    throw NumericalError(
        "winding_index: loop winding failed integer self-check (residual " +
        std::to_string(std::abs(loops - m)) + ")");
  }
  return WindingResult{2 * m + autonomous_cz(rates),
                       2.0 * m + autonomous_mean(rates)};
}

WindingResult winding_index(const SymplecticPath& path) {
  return winding_index_from(endpoint_log(path.endpoint()), path);
}

IndexReport diagonal_closed_form(const std::vector<double>& angles,
                                 double margin) {
  IndexReport rep;
  rep.method = IndexMethod::closed_form_diagonal;
  rep.endpoint_margin = margin;
  double mean = 0.0;
  long long cz = 0;
  for (double a : angles) {
    mean += a / kPi;
    cz += 2 * static_cast<long long>(std::floor(a / kTwoPi)) + 1;
  }
  rep.cz = cz;
  rep.mean = mean;
  return rep;
}

// --- Crossing oracle internals -------------------------------------------

// Symmetric generator A(t) of the path (J0 Mdot M^{-1}), from the stored
// generator when present, else by central finite differences on the geodesic
// interpolant.
Matrix oracle_generator(const SymplecticPath& path, double t) {
  if (path.generator) return path.generator(t);
  double h = 1e-6;
  double a = std::max(0.0, t - h), b = std::min(1.0, t + h);
  Matrix Md = (path.eval(b) - path.eval(a)) / (b - a);
  Matrix A = standard_J(path.n) * Md * path.eval(t).inverse();
  return 0.5 * (A + A.transpose());
}

// Signature (p - q) of a symmetric matrix; throws if an eigenvalue is too
// close to zero to sign confidently.
int signature(const Matrix& S, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  int sig = 0;
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()(i);
    if (std::abs(ev) < tol * scale) {
      throw NumericalError("crossing form has near-zero eigenvalue");
    }
    sig += ev > 0 ? 1 : -1;
  }
  return sig;
}

// One attempt at the crossing count on the path perturbed by M(t) R(eps*t).
long long crossing_count_attempt(const SymplecticPath& path, double eps) {
  int n = path.n;
  Matrix J = standard_J(n);
  auto N_at = [&](double t) -> Matrix {
    std::vector<double> th(n, eps * t);
    return path.eval(t) * block_rotation(th);
  };
  auto A_at = [&](double t) -> Matrix {
    // Generator of the product path: A + eps * (-J0 M M^T J0)  (positive
    // definite tilt), with M = M(t).
    Matrix M = path.eval(t);
    Matrix A = oracle_generator(path, t);
    return A - eps * (J * M * M.transpose() * J);
  };

  // Endpoint offset at t = 0: half the signature of the full-space form.
  long long total = signature(A_at(0.0), 1e-7);
  if (total % 2 != 0) {
    throw NumericalError("crossing oracle: odd signature at t = 0");
  }
  total /= 2;

  // Locate zeros of sigma_min(N(t) - I) on (0, 1) by scanning local minima
  // and ternary refinement (catches tangential multi-eigenvalue crossings
  // that det sign changes miss).
  const int grid = 4096;
  std::vector<double> smin(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    double t = static_cast<double>(i) / grid;
    Matrix D = N_at(t) - Matrix::Identity(2 * n, 2 * n);
    smin[i] = D.jacobiSvd().singularValues().minCoeff();
  }
  std::vector<double> crossings;
  for (int i = 1; i < grid; ++i) {
    if (smin[i] > 0.05) continue;
    if (!(smin[i] <= smin[i - 1] && smin[i] <= smin[i + 1])) continue;
    double lo = static_cast<double>(i - 1) / grid;
    double hi = static_cast<double>(i + 1) / grid;
    for (int it = 0; it < 200; ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      auto sm = [&](double t) {
        Matrix D = N_at(t) - Matrix::Identity(2 * n, 2 * n);
        return D.jacobiSvd().singularValues().minCoeff();
      };
      if (sm(m1) < sm(m2))
        hi = m2;
      else
        lo = m1;
      if (hi - lo < 1e-13) break;
    }
    double t_star = 0.5 * (lo + hi);
    Matrix D = N_at(t_star) - Matrix::Identity(2 * n, 2 * n);
    double v = D.jacobiSvd().singularValues().minCoeff();
    if (v < 1e-7 && t_star > 1e-9 && t_star < 1.0 - 1e-9) {
      crossings.push_back(t_star);
    }
  }

  for (double t : crossings) {
    Matrix D = N_at(t) - Matrix::Identity(2 * n, 2 * n);
    Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeFullV);
    double smax = svd.singularValues().maxCoeff();
    std::vector<int> kernel_cols;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) < 1e-6 * std::max(1.0, smax)) {
        kernel_cols.push_back(i);
      }
    }
    if (kernel_cols.empty()) continue;
    Matrix V(2 * n, static_cast<int>(kernel_cols.size()));
    for (size_t c = 0; c < kernel_cols.size(); ++c) {
      V.col(static_cast<int>(c)) = svd.matrixV().col(kernel_cols[c]);
    }
    Matrix Gamma = V.transpose() * A_at(t) * V;
    total += signature(Gamma, 1e-5);
  }
  return total;
}

}  // namespace

long long cz_crossing_oracle(const SymplecticPath& path) {
  double margin = path.endpoint_margin();
  if (margin < kDegenerateMargin) {
    throw ValidationError("crossing oracle: degenerate endpoint");
  }
  // Perturbation ladder: keep the endpoint in the same nondegenerate class.
  const double det_end =
      (path.endpoint() - Matrix::Identity(2 * path.n, 2 * path.n)).determinant();
  for (double eps : {1e-6, -1e-6, 3e-6, -3e-6, 1e-5, -1e-5, 3e-5, -3e-5}) {
    std::vector<double> th(path.n, eps);
    Matrix Wp = path.endpoint() * block_rotation(th);
    double det_p = (Wp - Matrix::Identity(2 * path.n, 2 * path.n)).determinant();
    if (det_p * det_end <= 0.0 || std::abs(det_p) < 0.25 * margin) continue;
    try {
      return crossing_count_attempt(path, eps);
    } catch (const NumericalError&) {
      continue;  // irregular crossing at this eps; try the next one
    }
  }
  throw NumericalError("crossing oracle: no regularizing perturbation found");
}

IndexReport cz_index(const SymplecticPath& path) {
  double margin = path.endpoint_margin();
  if (margin < kDegenerateMargin) return cz_index_lsc(path);
  if (path.diagonal_angles) {
    return diagonal_closed_form(*path.diagonal_angles, margin);
  }
  IndexReport rep;
  rep.endpoint_margin = margin;
  bool has_log = true;
  Matrix L;
  try {
    L = endpoint_log(path.endpoint());
  } catch (const NumericalError&) {
    has_log = false;
  }
  if (has_log) {
    // A failed integer self-check here means the path samples are too
    // sparse to track the winding (fast-rotating iterates); the fallbacks
    // below share the same sampled interpolant and would silently drop
    // crossings, so propagate and let the caller re-flow more finely.
    WindingResult w = winding_index_from(L, path);
    rep.cz = w.cz;
    rep.mean = w.mean;
    rep.method = IndexMethod::winding;
    return rep;
  }
  // Endpoint without principal real log (e.g. eigenvalue on the negative
  // real axis). Elliptic -1 pairs move off the axis under a tiny
  // multiplicative end-rotation, under which the index is locally constant.
  for (double eps : {1e-6, -1e-6}) {
    SymplecticPath pert = end_perturbed(path, eps);
    double m2 = pert.endpoint_margin();
    if (m2 < 0.25 * margin) continue;
    try {
      WindingResult w = winding_index(pert);
      rep.cz = w.cz;
      rep.mean = w.mean;  // refined below for the unperturbed endpoint
      rep.method = IndexMethod::winding;
      return rep;
    } catch (const NumericalError&) {
      continue;
    }
  }
  // Negative-hyperbolic endpoints: fall back to the crossing oracle; the
  // mean falls back to a windowed per-period winding estimate.
  rep.cz = cz_crossing_oracle(path);
  rep.method = IndexMethod::crossing_oracle;
  rep.mean = mean_cz(path);
  return rep;
}

IndexReport cz_index_lsc(const SymplecticPath& path) {
  double margin = path.endpoint_margin();
  if (margin >= kDegenerateMargin) {
    return cz_index(path);  // lsc extension agrees on nondegenerate paths
  }
  IndexReport rep;
  rep.degenerate_endpoint = true;
  rep.endpoint_margin = margin;
  if (path.diagonal_angles) {
    // Closed form: a degenerate angle 2 pi m contributes 2m - 1 (the liminf
    // side), a nondegenerate angle its usual term.
    long long cz = 0;
    double mean = 0.0;
    for (double a : *path.diagonal_angles) {
      mean += a / kPi;
      if (dist_to_multiple(a, kTwoPi) < 1e-9) {
        cz += 2 * std::llround(a / kTwoPi) - 1;
      } else {
        cz += 2 * static_cast<long long>(std::floor(a / kTwoPi)) + 1;
      }
    }
    rep.cz = cz;
    rep.mean = mean;
    rep.method = IndexMethod::closed_form_diagonal;
    return rep;
  }
  bool have = false;
  long long best = 0;
  double mean = 0.0;
  for (double eps : {-1e-4, 1e-4}) {
    SymplecticPath pert = end_perturbed(path, eps);
    if (pert.endpoint_margin() < kDegenerateMargin) continue;
    IndexReport r = cz_index(pert);
    if (!have || r.cz < best) best = r.cz;
    have = true;
    mean = r.mean;  // perturbed means straddle the true value by O(eps)
  }
  if (!have) {
    throw NumericalError("cz_index_lsc: perturbation family stayed degenerate");
  }
  rep.cz = best;
  rep.mean = mean;
  rep.method = IndexMethod::winding;
  return rep;
}

long long maslov_loop(const SymplecticPath& loop) {
  const Matrix& W = loop.endpoint();
  if ((W - Matrix::Identity(W.rows(), W.cols())).cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("maslov_loop: path is not a loop");
  }
  double w = polar_winding(loop);
  long long m = std::llround(w / kTwoPi);
  if (std::abs(w / kTwoPi - m) > 0.05) {
    throw NumericalError("maslov_loop: winding failed integer self-check");
  }
  return m;
}

double mean_cz(const SymplecticPath& path) {
  if (path.diagonal_angles) {
    double mean = 0.0;
    for (double a : *path.diagonal_angles) mean += a / kPi;
    return mean;
  }
  try {
    Matrix L = endpoint_log(path.endpoint());
    std::vector<double> rates = krein_signed_rates(L);
    double loops = (polar_winding(path) - polar_winding_exp(L)) / kTwoPi;
    long long m = std::llround(loops);
    if (std::abs(loops - m) > 0.05) {
      throw NumericalError("mean_cz: loop winding failed integer self-check");
    }
    return 2.0 * m + autonomous_mean(rates);
  } catch (const NumericalError&) {
    // Windowed per-period winding over the periodic extension (approximate;
    // only reached for endpoints without a principal real logarithm). The
    // per-period winding converges geometrically in the hyperbolic
    // directions, so the tail average over the reliable window suffices.
    // W^j is kept at unit scale (the polar factor ignores positive scaling)
    // and the iteration stops before cond(W^j) ~ |W^j|^2 destroys the SVD.
    const int K = 256;
    const Matrix& W = path.endpoint();
    Matrix Wj = Matrix::Identity(2 * path.n, 2 * path.n);
    double log_norm = 0.0;  // log |W^j|_F, tracked across rescalings
    std::vector<double> per_period;
    SymplecticPath seg;
    seg.n = path.n;
    for (int j = 0; j < K; ++j) {
      seg.times.clear();
      seg.samples.clear();
      for (size_t i = 0; i < path.times.size(); ++i) {
        seg.times.push_back(path.times[i]);
        seg.samples.push_back(path.samples[i] * Wj);
      }
      per_period.push_back(polar_winding(seg));
      Wj = W * Wj;
      double s = Wj.norm();
      log_norm += std::log(s);
      Wj /= s;
      if (2.0 * log_norm > std::log(1e10)) break;  // cond(W^{j+1}) too large
    }
    size_t window = std::max<size_t>(1, per_period.size() / 2);
    double tail = 0.0;
    for (size_t j = per_period.size() - window; j < per_period.size(); ++j) {
      tail += per_period[j];
    }
    return tail / window / kPi;
  }
}

DegreeInterval degree_support_interval(double mean, int n, long long shift) {
  return DegreeInterval{mean - shift - n, mean - shift + n};
}

}  // namespace symplab
