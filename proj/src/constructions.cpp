#include "symplab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "symplab/cz.hpp"
#include "symplab/linalg.hpp"

namespace symplab {

namespace {

// C^2 quintic step on [0,1].
double qstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}
double qstep_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

std::vector<double> angles_at_infinity(const AsymQuadHamiltonian& H) {
  auto ang = H.quad_diag_angles();
  if (!ang) {
    throw ValidationError(
        "constructions: diagonal quadratic data at infinity required");
  }
  return *ang;
}

void check_iterates(int k, int l) {
  if (!(k > l && l >= 1)) {
    throw ValidationError("constructions: need k > l >= 1");
  }
}

// Ramp-plateau-ramp window in v = log u with ramp width 5% of the log
// range. The weight it multiplies decays like 1/u, so equal log intervals
// carry equal mass; linear-width ramps would swallow nearly all of it
// whenever b/a is large.
struct Window {
  double va = 0.0, vb = 0.0, d = 0.0;  // log-space endpoints and ramp width
  static Window over(double a, double b) {
    double va = std::log(a), vb = std::log(b);
    return Window{va, vb, 0.05 * (vb - va)};
  }
  double value(double u) const {
    if (u <= 0.0) return 0.0;
    double v = std::log(u);
    if (v <= va || v >= vb) return 0.0;
    if (v < va + d) return qstep((v - va) / d);
    if (v > vb - d) return qstep((vb - v) / d);
    return 1.0;
  }
  double deriv(double u) const {
    if (u <= 0.0) return 0.0;
    double v = std::log(u);
    if (v <= va || v >= vb) return 0.0;
    if (v < va + d) return qstep_d((v - va) / d) / (d * u);
    if (v > vb - d) return -qstep_d((vb - v) / d) / (d * u);
    return 0.0;
  }
};

// The interpolation node K(t,z) = 1/2 <A^{chi(|z|^2)}_t z, z> where
// A^s_t = (1-s) A0(t) + s A1(t) is the affine family of concatenated
// diagonal quadratic generators. chi' = lambda * window(u) * C0/(C1 u).
class InterpKHam final : public HamImpl {
 public:
  AsymQuadHamiltonian A0_ham;  // R ^ Q^{xl}  (chosen-branch residual form)
  AsymQuadHamiltonian A1_ham;  // 0 ^ Q^{xl}
  Window win;
  double lambda = 0.0;
  double cap = 0.0;  // C0 / C1; chi'(u) = lambda * win(u) * cap / u
  bool constant_family = false;  // C1 == 0: A0 == A1, chi immaterial
  double R0sq = 0.0, R1sq = 0.0;
  // Prefix integrals of chi' at subinterval boundaries.
  std::vector<double> grid_u, grid_chi;
  double d_sup = 0.0;  // max_t ||A1(t) - A0(t)||

  double chi_prime(double u) const {
    if (constant_family || u <= R0sq || u >= R1sq) return 0.0;
    return lambda * win.value(u) * cap / u;
  }
  double chi_second(double u) const {
    if (constant_family || u <= R0sq || u >= R1sq) return 0.0;
    return lambda * cap * (win.deriv(u) / u - win.value(u) / (u * u));
  }
  double chi(double u) const {
    if (constant_family) return u > R0sq ? 1.0 : 0.0;
    if (u <= R0sq) return 0.0;
    if (u >= R1sq) return 1.0;
    auto it = std::upper_bound(grid_u.begin(), grid_u.end(), u);
    size_t idx = static_cast<size_t>(it - grid_u.begin()) - 1;
    // 16-point Gauss-Legendre tail inside the subinterval.
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double a = grid_u[idx], h = 0.5 * (u - a), c = 0.5 * (u + a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      acc += gw[i] * (chi_prime(c - h * gx[i]) + chi_prime(c + h * gx[i]));
    }
    return std::min(1.0, grid_chi[idx] + h * acc);
  }

  double value(double t, const Vector& z) const override {
    double u = z.squaredNorm();
    double s = chi(u);
    Matrix A0 = A0_ham.quad_A(t), A1 = A1_ham.quad_A(t);
    return 0.5 * z.dot(((1.0 - s) * A0 + s * A1) * z);
  }
  Vector grad(double t, const Vector& z) const override {
    double u = z.squaredNorm();
    double s = chi(u);
    Matrix A0 = A0_ham.quad_A(t), A1 = A1_ham.quad_A(t);
    Vector Dz = (A1 - A0) * z;
    double two_phi = z.dot(Dz);
    return ((1.0 - s) * A0 + s * A1) * z + chi_prime(u) * two_phi * z;
  }
  Matrix hess(double t, const Vector& z) const override {
    double u = z.squaredNorm();
    double s = chi(u), cp = chi_prime(u), cpp = chi_second(u);
    Matrix A0 = A0_ham.quad_A(t), A1 = A1_ham.quad_A(t);
    Vector Dz = (A1 - A0) * z;
    double two_phi = z.dot(Dz);
    Matrix h = Matrix((1.0 - s) * A0 + s * A1);
    h += 2.0 * cp * (Dz * z.transpose() + z * Dz.transpose());
    h += (2.0 * cpp * two_phi) * (z * z.transpose());
    h += (cp * two_phi) * Matrix::Identity(z.size(), z.size());
    return h;
  }
  Matrix quad_A(double t) const override { return A1_ham.quad_A(t); }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    return A1_ham.quad_diag_angles();
  }
  double h_sup() const override { return 0.5 * d_sup * R1sq; }
  double grad_h_sup() const override {
    double r1 = std::sqrt(R1sq);
    return d_sup * r1 * (1.0 + (constant_family ? 0.0 : lambda * cap));
  }
  std::vector<double> breakpoints() const override {
    return A1_ham.breakpoints();
  }
};

// Pure quadratic node -1 x the quadratic part of a child: used to replace
// the asymptotic quadratic of a composite Hamiltonian by another one while
// keeping the bounded part intact.
class NegQuadHam final : public HamImpl {
 public:
  AsymQuadHamiltonian child;
  double value(double t, const Vector& z) const override {
    return -0.5 * z.dot(child.quad_A(t) * z);
  }
  Vector grad(double t, const Vector& z) const override {
    return -(child.quad_A(t) * z);
  }
  Matrix hess(double t, const Vector&) const override {
    return -child.quad_A(t);
  }
  Matrix quad_A(double t) const override { return -child.quad_A(t); }
  double h_sup() const override { return 0.0; }
  double grad_h_sup() const override { return 0.0; }
  std::vector<double> breakpoints() const override {
    return child.breakpoints();
  }
};

}  // namespace

AsymQuadHamiltonian LoopQuadratic::hamiltonian() const {
  std::vector<double> angles(m.size());
  for (size_t r = 0; r < m.size(); ++r) {
    angles[r] = kTwoPi * static_cast<double>(m[r]);
  }
  return AsymQuadHamiltonian::quad_diag(angles);
}

std::pair<long long, long long> sigma_and_mu(const AsymQuadHamiltonian& H,
                                             int k, int l) {
  check_iterates(k, l);
  IndexReport ik = index_at_infinity(AsymQuadHamiltonian::iterate(H, k));
  IndexReport il = index_at_infinity(AsymQuadHamiltonian::iterate(H, l));
  long long sigma = ik.cz - il.cz;
  if (sigma % 2 != 0) {
    throw NumericalError("sigma_and_mu: odd index difference");
  }
  double mean = index_at_infinity(H).mean;
  int n = H.n();
  if (std::abs(static_cast<double>(sigma) - (k - l) * mean) >
      2.0 * n + 1e-6) {
    throw NumericalError("sigma_and_mu: mean-index bound violated");
  }
  return {sigma, sigma / 2};
}

LoopQuadratic build_Pmu(const AsymQuadHamiltonian& H, int k, int l,
                        long long mu) {
  check_iterates(k, l);
  std::vector<double> alpha = angles_at_infinity(H);
  LoopQuadratic P;
  P.m.resize(alpha.size());
  long long total = 0;
  for (size_t r = 0; r < alpha.size(); ++r) {
    P.m[r] = static_cast<long long>(std::floor((k - l) * alpha[r] / kTwoPi));
    total += P.m[r];
  }
  P.m[0] += mu - total;  // exactness of the loop index takes precedence
  SymplecticPath loop = quadratic_flow_path(P.hamiltonian());
  P.maslov = maslov_loop(loop);
  if (P.maslov != mu) {
    throw NumericalError("build_Pmu: loop index verification failed");
  }
  return P;
}

AsymQuadHamiltonian reindex(const AsymQuadHamiltonian& H, int k, int l) {
  check_iterates(k, l);
  auto [sigma, mu] = sigma_and_mu(H, k, l);
  LoopQuadratic P = build_Pmu(H, k, l, mu);
  std::vector<double> neg(P.m.size());
  for (size_t r = 0; r < neg.size(); ++r) {
    neg[r] = -kTwoPi * static_cast<double>(P.m[r]);
  }
  AsymQuadHamiltonian Pbar = AsymQuadHamiltonian::quad_diag(neg);
  AsymQuadHamiltonian left =
      compose(Pbar, AsymQuadHamiltonian::iterate(H, k - l));
  return AsymQuadHamiltonian::concat(left, AsymQuadHamiltonian::iterate(H, l));
}

double interpolation_outer_radius(double R0, double C0, double C1) {
  if (R0 <= 0.0 || C0 <= 0.0 || C1 < 0.0) {
    throw ValidationError("interpolation_outer_radius: bad constants");
  }
  return std::exp(5.0 * C1 / (4.0 * C0)) * R0;
}

InterpolationProfile nonresonant_homotopy(const AsymQuadHamiltonian& H, int k,
                                          int l, double R0) {
  check_iterates(k, l);
  if (R0 <= 0.0) throw ValidationError("nonresonant_homotopy: R0 must be > 0");
  std::vector<double> alpha = angles_at_infinity(H);
  auto [sigma, mu] = sigma_and_mu(H, k, l);
  LoopQuadratic P = build_Pmu(H, k, l, mu);

  InterpolationProfile prof;
  prof.n = H.n();
  prof.l = l;
  prof.R0 = R0;
  prof.alpha = alpha;
  prof.beta.resize(alpha.size());
  prof.branch.resize(alpha.size());

  for (size_t r = 0; r < alpha.size(); ++r) {
    double b = (k - l) * alpha[r] - kTwoPi * static_cast<double>(P.m[r]);
    // Pick the arc representative b + 2 pi j, |.| < 2 pi, whose sweep
    // (1-s) c + l alpha_r never meets 2 pi Z for s in (0,1).
    bool found = false;
    double bad_s = -1.0;
    for (int j : {0, -1, 1}) {
      double c = b + kTwoPi * j;
      if (std::abs(c) >= kTwoPi || std::abs(c) < 1e-12) {
        if (std::abs(c) < 1e-12 && !found) {
          prof.beta[r] = 0.0;  // no residual rotation on this plane
          prof.branch[r] = j;
          found = true;
        }
        continue;
      }
      double th1 = l * alpha[r], th0 = c + th1;
      double lo = std::min(th0, th1), hi = std::max(th0, th1);
      bool resonant = false;
      for (long long q = static_cast<long long>(std::floor(lo / kTwoPi)) - 1;
           q <= static_cast<long long>(std::ceil(hi / kTwoPi)) + 1; ++q) {
        double target = kTwoPi * static_cast<double>(q);
        if (target > lo + 1e-12 && target < hi - 1e-12) {
          resonant = true;
          bad_s = 1.0 - (target - th1) / c;
          break;
        }
      }
      if (!resonant) {
        prof.beta[r] = c;
        prof.branch[r] = j;
        found = true;
        break;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "nonresonant_homotopy: plane " << r
         << " resonates on both arcs (s = " << bad_s << ")";
      throw NumericalError(os.str());
    }
  }

  // C0: minimum over the s-grid of sigma_min(M^s_1 - I), with a refinement
  // check at twice the resolution. Per plane the endpoint is the rotation by
  // (1-s) beta_r + l alpha_r.
  auto c0_on_grid = [&](int grid) {
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
      double s = static_cast<double>(i) / grid;
      std::vector<double> theta(alpha.size());
      for (size_t r = 0; r < alpha.size(); ++r) {
        theta[r] = (1.0 - s) * prof.beta[r] + l * alpha[r];
      }
      Matrix M = block_rotation(theta);
      Eigen::BDCSVD<Matrix> svd(M - Matrix::Identity(M.rows(), M.cols()));
      double sv = svd.singularValues().minCoeff();
      if (sv < 1e-8) {
        std::ostringstream os;
        os << "nonresonant_homotopy: endpoint resonance at s = " << s;
        throw NumericalError(os.str());
      }
      mn = std::min(mn, sv);
    }
    return mn;
  };
  double c0a = c0_on_grid(256);
  double c0b = c0_on_grid(512);
  prof.C0 = std::min(c0a, c0b);

  // C1: max over (s, t) grids of the central-difference norm of the
  // s-derivative of the concatenated generator. The family is affine in s.
  AsymQuadHamiltonian Ql = AsymQuadHamiltonian::quad_diag([&] {
    std::vector<double> a(alpha.size());
    for (size_t r = 0; r < a.size(); ++r) a[r] = l * alpha[r];
    return a;
  }());
  AsymQuadHamiltonian A0h =
      AsymQuadHamiltonian::concat(AsymQuadHamiltonian::quad_diag(prof.beta),
                                  Ql);
  AsymQuadHamiltonian A1h = AsymQuadHamiltonian::concat(
      AsymQuadHamiltonian::quad_diag(std::vector<double>(alpha.size(), 0.0)),
      Ql);
  double c1 = 0.0;
  const double ds = 1.0 / 512.0;
  for (int i = 0; i <= 256; ++i) {
    double t = static_cast<double>(i) / 256.0;
    Matrix A0 = A0h.quad_A(t), A1 = A1h.quad_A(t);
    // Central difference of (1-s)A0 + sA1 in s.
    Matrix D = ((0.5 + ds) * A1 + (0.5 - ds) * A0 -
                ((0.5 - ds) * A1 + (0.5 + ds) * A0)) /
               (2.0 * ds);
    c1 = std::max(c1, D.operatorNorm());
  }
  prof.C1 = c1;
  prof.R1 = interpolation_outer_radius(R0, prof.C0, prof.C1);

  // chi' = lambda * window(u) * C0/(C1 u) on [R0^2, R1^2], lambda fixed so
  // the total integral is exactly 1.
  double a = prof.R0 * prof.R0, bnd = prof.R1 * prof.R1;
  if (prof.C1 > 0.0) {
    Window win = Window::over(a, bnd);
    double cap = prof.C0 / prof.C1;
    // Log-spaced cells: the integrand ~ 1/u spreads its mass evenly in
    // log u, so uniform cells would miss it entirely for large b/a.
    auto cell_edge = [&](int i, int cells) {
      return std::exp(win.va + (win.vb - win.va) * i / cells);
    };
    const int cells = 2048;
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    for (int i = 0; i < cells; ++i) {
      double u0 = cell_edge(i, cells);
      double u1 = cell_edge(i + 1, cells);
      double h = 0.5 * (u1 - u0), c = 0.5 * (u1 + u0);
      for (int g = 0; g < 8; ++g) {
        total += h * gw[g] *
                 (win.value(c - h * gx[g]) * cap / (c - h * gx[g]) +
                  win.value(c + h * gx[g]) * cap / (c + h * gx[g]));
      }
    }
    prof.lambda = 1.0 / total;
    if (prof.lambda > 1.0 + 1e-9) {
      std::ostringstream os;
      os << "nonresonant_homotopy: chi cap unsatisfiable (total = " << total
         << ", C0 = " << prof.C0 << ", C1 = " << prof.C1
         << ", R1 = " << prof.R1 << ")";
      throw NumericalError(os.str());
    }
    // Knots for reporting.
    prof.chi_knots.resize(257);
    double acc = 0.0, prev = a;
    for (int i = 0; i <= 256; ++i) {
      double u = cell_edge(i, 256);
      if (i > 0) {
        double h = 0.5 * (u - prev), c = 0.5 * (u + prev);
        for (int g = 0; g < 8; ++g) {
          acc += h * gw[g] * prof.lambda *
                 (win.value(c - h * gx[g]) * cap / (c - h * gx[g]) +
                  win.value(c + h * gx[g]) * cap / (c + h * gx[g]));
        }
      }
      prof.chi_knots[i] = {u, std::min(1.0, acc),
                           prof.lambda * win.value(u) * cap / u};
      prev = u;
    }
  } else {
    // Constant family: the interpolation is independent of chi.
    prof.lambda = 0.0;
    prof.chi_knots = {{a, 0.0, 0.0}, {bnd, 1.0, 0.0}};
  }
  return prof;
}

AsymQuadHamiltonian build_K(const InterpolationProfile& prof) {
  auto node = std::make_shared<InterpKHam>();
  node->n = prof.n;
  std::vector<double> lal(prof.alpha.size());
  for (size_t r = 0; r < lal.size(); ++r) lal[r] = prof.l * prof.alpha[r];
  AsymQuadHamiltonian Ql = AsymQuadHamiltonian::quad_diag(lal);
  node->A0_ham = AsymQuadHamiltonian::concat(
      AsymQuadHamiltonian::quad_diag(prof.beta), Ql);
  node->A1_ham = AsymQuadHamiltonian::concat(
      AsymQuadHamiltonian::quad_diag(std::vector<double>(lal.size(), 0.0)),
      Ql);
  node->R0sq = prof.R0 * prof.R0;
  node->R1sq = prof.R1 * prof.R1;
  node->lambda = prof.lambda;
  node->constant_family = prof.C1 <= 0.0;
  node->cap = node->constant_family ? 0.0 : prof.C0 / prof.C1;
  // Prefix integrals of chi' on a log-spaced grid (mass ~ 1/u).
  if (!node->constant_family) {
    node->win = Window::over(node->R0sq, node->R1sq);
    const int cells = 2048;
    node->grid_u.resize(cells + 1);
    node->grid_chi.resize(cells + 1);
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589,
                                 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236,
                                 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double acc = 0.0;
    node->grid_u[0] = node->R0sq;
    node->grid_chi[0] = 0.0;
    for (int i = 0; i < cells; ++i) {
      double u0 = node->R0sq * std::pow(node->R1sq / node->R0sq,
                                        static_cast<double>(i) / cells);
      double u1 = node->R0sq * std::pow(node->R1sq / node->R0sq,
                                        static_cast<double>(i + 1) / cells);
      double h = 0.5 * (u1 - u0), c = 0.5 * (u1 + u0);
      for (int g = 0; g < 8; ++g) {
        acc += h * gw[g] *
               (node->chi_prime(c - h * gx[g]) +
                node->chi_prime(c + h * gx[g]));
      }
      node->grid_u[i + 1] = u1;
      node->grid_chi[i + 1] = acc;
    }
  }
  // Slope bound of the affine family, for the certified perturbation bounds.
  double dmax = 0.0;
  for (int i = 0; i <= 256; ++i) {
    double t = static_cast<double>(i) / 256.0;
    Matrix D = node->A1_ham.quad_A(t) - node->A0_ham.quad_A(t);
    dmax = std::max(dmax, D.operatorNorm());
  }
  node->d_sup = dmax;
  return AsymQuadHamiltonian(node);
}

PipelinePair build_pipeline_pair(const AsymQuadHamiltonian& H, int k, int l,
                                 double R0) {
  check_iterates(k, l);
  AsymQuadHamiltonian Hk = AsymQuadHamiltonian::iterate(H, k);

  SearchConfig cfg;
  auto records = find_fixed_points(Hk, cfg);
  double enclosing = 0.0;
  for (const auto& rec : records) enclosing = std::max(enclosing, rec.z.norm());
  double cert_radius = nondegeneracy_certificate(Hk).apriori_radius;
  if (R0 <= 0.0) {
    R0 = std::max(1.5 * std::max(enclosing, 1e-3), cert_radius);
  } else if (enclosing > R0 / 1.1) {
    std::ostringstream os;
    os << "build_pipeline_pair: R0 too small, need at least "
       << 1.1 * enclosing;
    throw ValidationError(os.str());
  }

  PipelinePair pair;
  pair.k = k;
  pair.l = l;
  auto [sigma, mu] = sigma_and_mu(H, k, l);
  pair.sigma = sigma;
  pair.mu = mu;
  pair.profile = nonresonant_homotopy(H, k, l, R0);
  pair.R0 = pair.profile.R0;
  pair.R1 = pair.profile.R1;
  pair.C0 = pair.profile.C0;
  pair.C1 = pair.profile.C1;

  AsymQuadHamiltonian Hkl = reindex(H, k, l);
  AsymQuadHamiltonian K = build_K(pair.profile);
  auto neg = std::make_shared<NegQuadHam>();
  neg->n = H.n();
  neg->child = Hkl;
  pair.F = AsymQuadHamiltonian::sum(
      {Hkl, K, AsymQuadHamiltonian(neg)});
  pair.G = AsymQuadHamiltonian::concat(AsymQuadHamiltonian::zero(H.n()),
                                       AsymQuadHamiltonian::iterate(H, l));

  // Uniform distance |F - G| over a dense deterministic sample of the ball
  // of radius 2 R1 times the time circle.
  pair.shift_bound =
      4.0 * (k - l) * H.h_sup() + 8.0 * kPi * pair.R1 * pair.R1;
  std::mt19937 rng(20240915);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = 2 * H.n();
  double shift = 0.0;
  for (int i = 0; i < 400; ++i) {
    Vector z(d);
    for (int j = 0; j < d; ++j) z[j] = gauss(rng);
    z *= 2.0 * pair.R1 * std::pow(unif(rng), 1.0 / d) / z.norm();
    for (int it = 0; it <= 16; ++it) {
      double t = static_cast<double>(it) / 16.0;
      shift = std::max(shift,
                       std::abs(pair.F.value(t, z) - pair.G.value(t, z)));
    }
  }
  pair.shift_measured = shift;
  if (pair.shift_measured > pair.shift_bound) {
    throw NumericalError("build_pipeline_pair: shift bound violated");
  }

  // Fixed-point transport: indices shift by sigma, actions agree.
  for (const auto& rec : records) {
    PipelineFixedPoint fp;
    fp.z = rec.z;
    fp.action_k = rec.action;
    fp.cz_k = rec.cz;
    FlowResult fr = flow(pair.F, rec.z, 1.0, 1e-9, true);
    fp.residual_F = (fr.endpoint - rec.z).norm();
    if (fp.residual_F > 1e-6) {
      throw NumericalError(
          "build_pipeline_pair: fixed point lost by the interpolation");
    }
    // Retry with denser samples if the winding self-check reports the
    // linearization path as under-resolved.
    IndexReport ir;
    for (double ctol = 1e-9;; ctol *= 1e-2) {
      const SymplecticPath& lin = *fr.linearization;
      try {
        ir = (lin.endpoint_margin() < 1e-6) ? cz_index_lsc(lin)
                                            : cz_index(lin);
        break;
      } catch (const NumericalError&) {
        if (ctol <= 1e-12) throw;
        fr = flow(pair.F, rec.z, 1.0, std::max(1e-12, ctol * 1e-2), true);
      }
    }
    fp.cz_F = ir.cz;
    fp.action_F = action(pair.F, rec.z);
    pair.fixed_points.push_back(std::move(fp));
  }
  return pair;
}

}  // namespace symplab
