#include "symplab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <tuple>

#include "symplab/linalg.hpp"

namespace symplab {

namespace {

constexpr double kBlowupNorm = 1e6;
constexpr double kInnerTol = 1e-11;

std::vector<double> breakpoints_in_window(const AsymQuadHamiltonian& H,
                                          double t1) {
  std::vector<double> out;
  auto base = H.impl()->breakpoints();
  double lo = std::min(0.0, t1), hi = std::max(0.0, t1);
  int k0 = static_cast<int>(std::floor(lo)) - 1;
  int k1 = static_cast<int>(std::ceil(hi)) + 1;
  for (int k = k0; k <= k1; ++k) {
    if (k != 0 && k > lo && k < hi) out.push_back(k);  // period seams
    for (double b : base) {
      double t = k + b;
      if (t > lo && t < hi) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct TrajPoint {
  double t;
  Vector z;
  Vector dz;
};

Vector hermite_z(const std::vector<TrajPoint>& traj, double t) {
  if (traj.size() == 1 || t <= traj.front().t) return traj.front().z;
  if (t >= traj.back().t) return traj.back().z;
  size_t lo = 0, hi = traj.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (traj[mid].t <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const TrajPoint& a = traj[lo];
  const TrajPoint& b = traj[hi];
  double h = b.t - a.t;
  if (h <= 0.0) return a.z;
  double s = (t - a.t) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * a.z + h10 * h * a.dz + h01 * b.z + h11 * h * b.dz;
}

}  // namespace

FlowResult flow(const AsymQuadHamiltonian& H, const Vector& z0, double t1,
                double tol, bool with_linearization) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) {
    throw ValidationError("flow: tol must lie in [1e-12, 1e-4]");
  }
  const int d = 2 * H.n();
  if (z0.size() != d) throw ValidationError("flow: point dimension mismatch");

  FlowResult out;
  out.ode_tolerance = tol;
  if (t1 == 0.0) {
    out.endpoint = z0;
    out.trajectory.push_back({0.0, z0});
    if (with_linearization) {
      SymplecticPath P;
      P.n = H.n();
      P.times = {0.0, 1.0};
      P.samples = {Matrix::Identity(d, d), Matrix::Identity(d, d)};
      out.linearization = std::move(P);
    }
    return out;
  }

  const Matrix J = standard_J(H.n());
  auto impl = H.impl();
  const int dim = with_linearization ? d + d * d : d;

  auto rhs = [&](double t, const Vector& y) {
    Vector dy(dim);
    Vector z = y.head(d);
    dy.head(d) = -J * impl->grad(t, z);
    if (with_linearization) {
      Matrix A = impl->hess(t, z);
      Eigen::Map<const Matrix> Y(y.data() + d, d, d);
      Eigen::Map<Matrix> dY(dy.data() + d, d, d);
      dY = -J * (A * Y);
    }
    return dy;
  };

  auto traj = std::make_shared<std::vector<TrajPoint>>();
  SymplecticPath P;
  P.n = H.n();

  Vector y(dim);
  y.head(d) = z0;
  if (with_linearization) {
    Eigen::Map<Matrix>(y.data() + d, d, d) = Matrix::Identity(d, d);
  }

  OdeOptions opts;
  opts.tol = tol;
  opts.breakpoints = breakpoints_in_window(H, t1);

  auto observer = [&](double t, const Vector& yy, const Vector& dyy) {
    Vector z = yy.head(d);
    if (z.norm() > kBlowupNorm) {
      throw NumericalError("flow: trajectory norm exceeded 1e6 (blow-up)");
    }
    traj->push_back({t, z, dyy.head(d)});
    out.trajectory.push_back({t, z});
    if (with_linearization) {
      P.times.push_back(t / t1);
      P.samples.push_back(Eigen::Map<const Matrix>(yy.data() + d, d, d));
    }
  };

  out.stats = integrate_ode(rhs, y, 0.0, t1, opts, observer);
  out.endpoint = y.head(d);

  if (with_linearization) {
    // Generator in rescaled time tau = t/t1: M'(tau) = -J (t1 * Hess) M.
    double scale = t1;
    P.generator = [impl, traj, scale](double tau) {
      double t = tau * scale;
      return Matrix(scale * impl->hess(t, hermite_z(*traj, t)));
    };
    if (auto ang = impl->quad_diag_angles()) {
      // Only exact when the Hamiltonian is purely quadratic diagonal.
      bool pure = false;
      try {
        pure = (impl->h_sup() == 0.0);
      } catch (const ValidationError&) {
        pure = false;
      }
      if (pure) {
        std::vector<double> a = *ang;
        for (double& x : a) x *= scale;
        P.diagonal_angles = a;
      }
    }
    out.linearization = std::move(P);
  }
  return out;
}

double action(const AsymQuadHamiltonian& H, const Vector& z0) {
  const int d = 2 * H.n();
  if (z0.size() != d) throw ValidationError("action: point dimension mismatch");
  {
    FlowResult probe = flow(H, z0, 1.0, 1e-10, false);
    if ((probe.endpoint - z0).norm() >= 1e-6) {
      throw ValidationError("action: z0 is not a fixed point of the time-1 map");
    }
  }
  const Matrix J = standard_J(H.n());
  auto impl = H.impl();
  auto rhs = [&](double t, const Vector& y) {
    Vector z = y.head(d);
    Vector g = impl->grad(t, z);
    Vector dy(d + 1);
    dy.head(d) = -J * g;
    dy[d] = 0.5 * z.dot(g) - impl->value(t, z);
    return dy;
  };
  Vector y(d + 1);
  y.head(d) = z0;
  y[d] = 0.0;
  OdeOptions opts;
  opts.tol = 1e-11;
  opts.breakpoints = breakpoints_in_window(H, 1.0);
  integrate_ode(rhs, y, 0.0, 1.0, opts);
  return y[d];
}

SymplecticPath quadratic_flow_path(const AsymQuadHamiltonian& H,
                                   int min_samples) {
  auto impl = H.impl();
  if (auto ang = impl->quad_diag_angles()) {
    return path_from_diagonal(*ang, min_samples);
  }
  const int d = 2 * H.n();
  const Matrix J = standard_J(H.n());
  auto rhs = [&](double t, const Vector& y) {
    Eigen::Map<const Matrix> Y(y.data(), d, d);
    Vector dy(d * d);
    Eigen::Map<Matrix> dY(dy.data(), d, d);
    dY = -J * (impl->quad_A(t) * Y);
    return dy;
  };
  SymplecticPath P;
  P.n = H.n();
  Vector y(d * d);
  Eigen::Map<Matrix>(y.data(), d, d) = Matrix::Identity(d, d);
  OdeOptions opts;
  opts.tol = kInnerTol;
  opts.max_step = 1.0 / min_samples;
  opts.breakpoints = breakpoints_in_window(H, 1.0);
  integrate_ode(rhs, y, 0.0, 1.0, opts,
                [&](double t, const Vector& yy, const Vector&) {
                  P.times.push_back(t);
                  P.samples.push_back(Eigen::Map<const Matrix>(yy.data(), d, d));
                });
  P.generator = [impl](double t) { return impl->quad_A(t); };
  return P;
}

Matrix linear_map_at_infinity(const AsymQuadHamiltonian& H) {
  return quadratic_flow_path(H).endpoint();
}

std::vector<double> sublinearity_diagnostic(const AsymQuadHamiltonian& H,
                                            const std::vector<double>& radii) {
  const int d = 2 * H.n();
  const Matrix Phi = linear_map_at_infinity(H);
  // Fixed deterministic sphere sample.
  std::mt19937 rng(20240901u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> dirs;
  for (int i = 0; i < 8 * d; ++i) {
    Vector v(d);
    for (int j = 0; j < d; ++j) v[j] = gauss(rng);
    double nv = v.norm();
    if (nv > 1e-8) dirs.push_back(v / nv);
  }
  std::vector<double> ratios;
  for (double R : radii) {
    if (R <= 0.0) throw ValidationError("sublinearity_diagnostic: radius <= 0");
    double worst = 0.0;
    for (const Vector& u : dirs) {
      Vector z = R * u;
      FlowResult fr = flow(H, z, 1.0, 1e-10, false);
      worst = std::max(worst, (fr.endpoint - Phi * z).norm() / R);
    }
    ratios.push_back(worst);
  }
  return ratios;
}

NondegeneracyCertificate nondegeneracy_certificate(
    const AsymQuadHamiltonian& H) {
  auto impl = H.impl();
  NondegeneracyCertificate cert;

  if (auto ang = impl->quad_diag_angles()) {
    double nu = std::numeric_limits<double>::infinity();
    for (double a : *ang) {
      double k = std::round(a / kTwoPi);
      for (double kk : {k - 1.0, k, k + 1.0}) {
        nu = std::min(nu, std::abs(a - kTwoPi * kk));
      }
    }
    cert.nu = nu;
    cert.method = "diagonal_closed_form";
  } else {
    // Smallest singular value of x -> x' + J0 A(t) x on 1-periodic loops,
    // discretized by trigonometric collocation on a uniform grid.
    const int N = 128;
    const int d = 2 * H.n();
    const Matrix J = standard_J(H.n());
    Matrix D = Matrix::Zero(N, N);
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) {
        if (j == k) continue;
        double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
        D(j, k) = kPi * sgn / std::tan(kPi * (j - k) / N);
      }
    }
    Matrix Op = Matrix::Zero(N * d, N * d);
    for (int j = 0; j < N; ++j) {
      Matrix JA = J * impl->quad_A(static_cast<double>(j) / N);
      Op.block(j * d, j * d, d, d) = JA;
      for (int k = 0; k < N; ++k) {
        for (int i = 0; i < d; ++i) Op(j * d + i, k * d + i) += D(j, k);
      }
    }
    Eigen::BDCSVD<Matrix> svd(Op);
    cert.nu = svd.singularValues().tail(1)(0);
    cert.method = "discretized_operator";
  }

  if (cert.nu < 1e-8) {
    throw ValidationError("nondegeneracy_certificate: degenerate at infinity");
  }

  cert.delta = impl->grad_h_sup();

  double Anorm = 0.0;
  for (int j = 0; j <= 64; ++j) {
    Matrix A = impl->quad_A(j / 64.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
    Anorm = std::max(Anorm, es.eigenvalues().cwiseAbs().maxCoeff());
  }

  // W^{1,2} bound on a 1-periodic orbit: |x'| and |x - (linear part)| are
  // controlled by delta/nu and delta(1 + |A|/nu); the sup-norm embedding
  // constant sqrt(2) and a 2x safety factor give the certified ball.
  double w12 = cert.delta * std::sqrt(1.0 / (cert.nu * cert.nu) +
                                      std::pow(1.0 + Anorm / cert.nu, 2));
  cert.apriori_radius = 2.0 * std::sqrt(2.0) * w12 + 1e-9;
  return cert;
}

IndexReport index_at_infinity(const AsymQuadHamiltonian& H) {
  SymplecticPath P = quadratic_flow_path(H);
  if (P.endpoint_margin() < 1e-8) {
    throw ValidationError("index_at_infinity: degenerate at infinity");
  }
  return cz_index(P);
}

// ---------------------------------------------------------------------------
// Combinators whose values are only reachable through inner integrations.

namespace {

class FlowDefinedHam : public HamImpl {
 public:
  std::function<double(double, const Vector&)> value_fn;
  std::function<Vector(double, const Vector&)> grad_fn;
  std::function<Matrix(double)> quadA_fn;
  std::optional<std::vector<double>> diag;
  std::vector<double> bps;

  double value(double t, const Vector& z) const override {
    return value_fn(t, z);
  }
  Vector grad(double t, const Vector& z) const override { return grad_fn(t, z); }
  Matrix hess(double t, const Vector& z) const override {
    const double h = 1e-5;
    Matrix H(2 * n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) {
      Vector zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      H.col(j) = (grad_fn(t, zp) - grad_fn(t, zm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
  }
  Matrix quad_A(double t) const override { return quadA_fn(t); }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    return diag;
  }
  double h_sup() const override {
    throw ValidationError("flow-defined Hamiltonian: no closed-form bounded part");
  }
  double grad_h_sup() const override {
    throw ValidationError("flow-defined Hamiltonian: no closed-form bounded part");
  }
  bool flow_defined() const override { return true; }
  std::vector<double> breakpoints() const override { return bps; }
};

bool is_pure_diag_quad(const AsymQuadHamiltonian& H) {
  auto impl = H.impl();
  if (impl->flow_defined()) return false;
  if (!impl->quad_diag_angles()) return false;
  if (!impl->breakpoints().empty()) return false;
  try {
    return impl->h_sup() == 0.0;
  } catch (const ValidationError&) {
    return false;
  }
}

// (state, transition) of the flow of F from time t0 to time t1 at z.
std::pair<Vector, Matrix> inner_flow(std::shared_ptr<const HamImpl> impl,
                                     const Vector& z, double t0, double t1,
                                     bool with_lin) {
  const int d = 2 * impl->n;
  const Matrix J = standard_J(impl->n);
  const int dim = with_lin ? d + d * d : d;
  Vector y(dim);
  y.head(d) = z;
  if (with_lin) Eigen::Map<Matrix>(y.data() + d, d, d) = Matrix::Identity(d, d);
  auto rhs = [&](double t, const Vector& yy) {
    Vector dy(dim);
    Vector zz = yy.head(d);
    dy.head(d) = -J * impl->grad(t, zz);
    if (with_lin) {
      Eigen::Map<const Matrix> Y(yy.data() + d, d, d);
      Eigen::Map<Matrix> dY(dy.data() + d, d, d);
      dY = -J * (impl->hess(t, zz) * Y);
    }
    return dy;
  };
  OdeOptions opts;
  opts.tol = kInnerTol;
  std::vector<double> bps;
  for (double b : impl->breakpoints()) {
    bps.push_back(b);
  }
  opts.breakpoints = bps;
  integrate_ode(rhs, y, t0, t1, opts);
  Matrix Y = with_lin ? Matrix(Eigen::Map<const Matrix>(y.data() + d, d, d))
                      : Matrix();
  return {y.head(d), Y};
}

std::shared_ptr<SymplecticPath> quad_path_ptr(const AsymQuadHamiltonian& H) {
  return std::make_shared<SymplecticPath>(quadratic_flow_path(H, 129));
}

}  // namespace

AsymQuadHamiltonian compose(const AsymQuadHamiltonian& F,
                            const AsymQuadHamiltonian& G) {
  if (F.n() != G.n()) throw ValidationError("compose: dimension mismatch");

  if (is_pure_diag_quad(F)) {
    std::vector<double> a = *F.impl()->quad_diag_angles();
    std::vector<double> inv_rates(a);
    for (double& x : inv_rates) x = -x;
    return AsymQuadHamiltonian::sum(
        {F, AsymQuadHamiltonian::unitary_frame(inv_rates, G)});
  }

  auto node = std::make_shared<FlowDefinedHam>();
  node->n = F.n();
  auto Fi = F.impl();
  auto Gi = G.impl();
  node->value_fn = [Fi, Gi](double t, const Vector& z) {
    Vector w = inner_flow(Fi, z, t, 0.0, false).first;
    return Fi->value(t, z) + Gi->value(t, w);
  };
  node->grad_fn = [Fi, Gi](double t, const Vector& z) {
    auto [w, M] = inner_flow(Fi, z, t, 0.0, true);
    return Vector(Fi->grad(t, z) + M.transpose() * Gi->grad(t, w));
  };
  auto PhiF = quad_path_ptr(F);
  node->quadA_fn = [Fi, Gi, PhiF](double t) {
    Matrix U = PhiF->eval(t).inverse();
    return Matrix(Fi->quad_A(t) + U.transpose() * Gi->quad_A(t) * U);
  };
  auto aF = Fi->quad_diag_angles();
  auto aG = Gi->quad_diag_angles();
  if (aF && aG) {
    std::vector<double> total(*aF);
    for (size_t r = 0; r < total.size(); ++r) total[r] += (*aG)[r];
    node->diag = total;
  }
  node->bps = Fi->breakpoints();
  for (double b : Gi->breakpoints()) node->bps.push_back(b);
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian reverse(const AsymQuadHamiltonian& F) {
  if (is_pure_diag_quad(F)) {
    std::vector<double> a = *F.impl()->quad_diag_angles();
    for (double& x : a) x = -x;
    return AsymQuadHamiltonian::quad_diag(a);
  }
  auto node = std::make_shared<FlowDefinedHam>();
  node->n = F.n();
  auto Fi = F.impl();
  node->value_fn = [Fi](double t, const Vector& z) {
    Vector w = inner_flow(Fi, z, 0.0, t, false).first;
    return -Fi->value(t, w);
  };
  node->grad_fn = [Fi](double t, const Vector& z) {
    auto [w, M] = inner_flow(Fi, z, 0.0, t, true);
    return Vector(-(M.transpose() * Fi->grad(t, w)));
  };
  auto PhiF = quad_path_ptr(F);
  node->quadA_fn = [Fi, PhiF](double t) {
    Matrix Phi = PhiF->eval(t);
    return Matrix(-(Phi.transpose() * Fi->quad_A(t) * Phi));
  };
  if (auto aF = Fi->quad_diag_angles()) {
    std::vector<double> a = *aF;
    for (double& x : a) x = -x;
    node->diag = a;
  }
  node->bps = Fi->breakpoints();
  return AsymQuadHamiltonian(node);
}

}  // namespace symplab
