#include "symplab/hamiltonian.hpp"

#include <cmath>

namespace symplab {

double TrigPoly::eval(double t) const {
  double v = c0;
  for (size_t k = 0; k < cos_c.size(); ++k) {
    v += cos_c[k] * std::cos(kTwoPi * (k + 1) * t);
  }
  for (size_t k = 0; k < sin_c.size(); ++k) {
    v += sin_c[k] * std::sin(kTwoPi * (k + 1) * t);
  }
  return v;
}

double TrigPoly::sup_bound() const {
  double b = std::abs(c0);
  for (double a : cos_c) b += std::abs(a);
  for (double a : sin_c) b += std::abs(a);
  return b;
}

namespace {

Matrix diag_quad_matrix(const std::vector<double>& angles) {
  int n = static_cast<int>(angles.size());
  Matrix A = Matrix::Zero(2 * n, 2 * n);
  for (int r = 0; r < n; ++r) {
    A(r, r) = angles[r];
    A(n + r, n + r) = angles[r];
  }
  return A;
}

// --- Base node: quadratic part + Gaussian bumps ---------------------------

class BaseHam : public HamImpl {
 public:
  // angles set => diagonal autonomous; else A_samples (uniform on [0,1),
  // wrapped, linearly interpolated).
  std::optional<std::vector<double>> angles;
  std::vector<Matrix> A_samples;
  std::vector<Bump> bumps;

  Matrix quad_A(double t) const override {
    if (angles) return diag_quad_matrix(*angles);
    double u = t - std::floor(t);
    double x = u * static_cast<double>(A_samples.size());
    size_t i = static_cast<size_t>(x) % A_samples.size();
    size_t j = (i + 1) % A_samples.size();
    double tau = x - std::floor(x);
    return (1.0 - tau) * A_samples[i] + tau * A_samples[j];
  }

  std::optional<std::vector<double>> quad_diag_angles() const override {
    return angles;
  }

  double value(double t, const Vector& z) const override {
    double v = 0.5 * z.dot(quad_A(t) * z);
    for (const Bump& b : bumps) {
      double d2 = (z - b.center).squaredNorm();
      v += b.coeff.eval(t) * std::exp(-d2 / (b.width * b.width));
    }
    return v;
  }

  Vector grad(double t, const Vector& z) const override {
    Vector g = quad_A(t) * z;
    for (const Bump& b : bumps) {
      Vector d = z - b.center;
      double s2 = b.width * b.width;
      double e = b.coeff.eval(t) * std::exp(-d.squaredNorm() / s2);
      g += e * (-2.0 / s2) * d;
    }
    return g;
  }

  Matrix hess(double t, const Vector& z) const override {
    Matrix H = quad_A(t);
    for (const Bump& b : bumps) {
      Vector d = z - b.center;
      double s2 = b.width * b.width;
      double e = b.coeff.eval(t) * std::exp(-d.squaredNorm() / s2);
      H += e * ((4.0 / (s2 * s2)) * (d * d.transpose()) -
                (2.0 / s2) * Matrix::Identity(2 * n, 2 * n));
    }
    return H;
  }

  double h_sup() const override {
    double b = 0.0;
    for (const Bump& bb : bumps) b += bb.coeff.sup_bound();
    return b;
  }

  double grad_h_sup() const override {
    // max |grad exp(-|d|^2/s^2)| = sqrt(2)/(s e^{1/2}) at |d| = s/sqrt(2).
    double b = 0.0;
    for (const Bump& bb : bumps) {
      b += bb.coeff.sup_bound() * std::sqrt(2.0) /
           (bb.width * std::exp(0.5));
    }
    return b;
  }
};

// --- Radial planar profile H = g(|z|^2) -----------------------------------

// Quintic polynomial step and its derivatives.
double p5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double p5d(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }
// Antiderivative of p5 on [0,1]: int_0^x p5 = 2.5 x^4 - 3 x^5 + x^6.
double p5I(double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); }

class RadialHam : public HamImpl {
 public:
  double theta0 = 0.0, theta_inf = 0.0, u_a = 1.0, u_b = 4.0;

  double gp(double u) const {
    return radial_gprime(theta0, theta_inf, u_a, u_b, u);
  }
  double gpp(double u) const {
    if (u <= u_a || u >= u_b) return 0.0;
    double w = u_b - u_a;
    return 0.5 * (theta_inf - theta0) * p5d((u - u_a) / w) / w;
  }

  double value(double t, const Vector& z) const override {
    (void)t;
    return radial_g(theta0, theta_inf, u_a, u_b, z.squaredNorm());
  }
  Vector grad(double t, const Vector& z) const override {
    (void)t;
    return 2.0 * gp(z.squaredNorm()) * z;
  }
  Matrix hess(double t, const Vector& z) const override {
    (void)t;
    double u = z.squaredNorm();
    return 2.0 * gp(u) * Matrix::Identity(2 * n, 2 * n) +
           4.0 * gpp(u) * (z * z.transpose());
  }
  Matrix quad_A(double t) const override {
    (void)t;
    return diag_quad_matrix(std::vector<double>(n, theta_inf));
  }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    return std::vector<double>(n, theta_inf);
  }
  double h_sup() const override {
    // h(u) = g(u) - (theta_inf/2) u is 0 at 0 and constant beyond u_b;
    // monotone in between, so the sup is |h(u_b)|.
    return std::abs(radial_g(theta0, theta_inf, u_a, u_b, u_b) -
                    0.5 * theta_inf * u_b);
  }
  double grad_h_sup() const override {
    // |grad h| = 2|g'(u) - theta_inf/2| sqrt(u), supported on u <= u_b.
    double best = 0.0;
    for (int i = 0; i <= 4096; ++i) {
      double u = u_b * i / 4096.0;
      best = std::max(best,
                      2.0 * std::abs(gp(u) - 0.5 * theta_inf) * std::sqrt(u));
    }
    return best;
  }
};

// --- Wrappers --------------------------------------------------------------

class TimeScaleHam : public HamImpl {
 public:
  int k = 1;
  std::shared_ptr<const HamImpl> child;

  static double frac(double x) { return x - std::floor(x); }
  double value(double t, const Vector& z) const override {
    return k * child->value(frac(k * t), z);
  }
  Vector grad(double t, const Vector& z) const override {
    return k * child->grad(frac(k * t), z);
  }
  Matrix hess(double t, const Vector& z) const override {
    return k * child->hess(frac(k * t), z);
  }
  Matrix quad_A(double t) const override {
    return k * child->quad_A(frac(k * t));
  }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    auto a = child->quad_diag_angles();
    if (!a) return std::nullopt;
    for (double& x : *a) x *= k;
    return a;
  }
  double h_sup() const override { return k * child->h_sup(); }
  double grad_h_sup() const override { return k * child->grad_h_sup(); }
  bool flow_defined() const override { return child->flow_defined(); }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    auto inner = child->breakpoints();
    for (int j = 0; j < k; ++j) {
      if (j > 0) out.push_back(static_cast<double>(j) / k);
      for (double b : inner) out.push_back((j + b) / k);
    }
    return out;
  }
};

class ConcatHam : public HamImpl {
 public:
  std::shared_ptr<const HamImpl> F, G;  // G runs first

  // (which, local time, weight): t<1/2 -> G at rho(2t) weighted 2 rho'(2t).
  struct Slot {
    const HamImpl* H;
    double tau;
    double w;
  };
  Slot slot(double t) const {
    if (t < 0.5) return {G.get(), rho_step(2.0 * t), 2.0 * rho_step_derivative(2.0 * t)};
    return {F.get(), rho_step(2.0 * t - 1.0),
            2.0 * rho_step_derivative(2.0 * t - 1.0)};
  }
  double value(double t, const Vector& z) const override {
    Slot s = slot(t);
    return s.w * s.H->value(s.tau, z);
  }
  Vector grad(double t, const Vector& z) const override {
    Slot s = slot(t);
    return s.w * s.H->grad(s.tau, z);
  }
  Matrix hess(double t, const Vector& z) const override {
    Slot s = slot(t);
    return s.w * s.H->hess(s.tau, z);
  }
  Matrix quad_A(double t) const override {
    Slot s = slot(t);
    return s.w * s.H->quad_A(s.tau);
  }
  double h_sup() const override {
    return 3.8 * std::max(F->h_sup(), G->h_sup());
  }
  double grad_h_sup() const override {
    return 3.8 * std::max(F->grad_h_sup(), G->grad_h_sup());
  }
  bool flow_defined() const override {
    return F->flow_defined() || G->flow_defined();
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (double b : G->breakpoints()) out.push_back(b / 2.0);
    out.push_back(0.5);
    for (double b : F->breakpoints()) out.push_back(0.5 + b / 2.0);
    return out;
  }
};

class SumHam : public HamImpl {
 public:
  std::vector<std::shared_ptr<const HamImpl>> parts;

  double value(double t, const Vector& z) const override {
    double v = 0.0;
    for (auto& p : parts) v += p->value(t, z);
    return v;
  }
  Vector grad(double t, const Vector& z) const override {
    Vector g = Vector::Zero(2 * n);
    for (auto& p : parts) g += p->grad(t, z);
    return g;
  }
  Matrix hess(double t, const Vector& z) const override {
    Matrix H = Matrix::Zero(2 * n, 2 * n);
    for (auto& p : parts) H += p->hess(t, z);
    return H;
  }
  Matrix quad_A(double t) const override {
    Matrix A = Matrix::Zero(2 * n, 2 * n);
    for (auto& p : parts) A += p->quad_A(t);
    return A;
  }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    std::vector<double> total(n, 0.0);
    for (auto& p : parts) {
      auto a = p->quad_diag_angles();
      if (!a) return std::nullopt;
      for (int r = 0; r < n; ++r) total[r] += (*a)[r];
    }
    return total;
  }
  double h_sup() const override {
    double b = 0.0;
    for (auto& p : parts) b += p->h_sup();
    return b;
  }
  double grad_h_sup() const override {
    double b = 0.0;
    for (auto& p : parts) b += p->grad_h_sup();
    return b;
  }
  bool flow_defined() const override {
    for (auto& p : parts)
      if (p->flow_defined()) return true;
    return false;
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (auto& p : parts) {
      auto b = p->breakpoints();
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }
};

class FrameHam : public HamImpl {
 public:
  std::vector<double> rates;  // R(t) = block_rotation(rates * t)
  std::shared_ptr<const HamImpl> child;

  Matrix R(double t) const {
    std::vector<double> th(rates);
    for (double& a : th) a *= t;
    return block_rotation(th);
  }
  double value(double t, const Vector& z) const override {
    return child->value(t, R(t) * z);
  }
  Vector grad(double t, const Vector& z) const override {
    Matrix Rt = R(t);
    return Rt.transpose() * child->grad(t, Rt * z);
  }
  Matrix hess(double t, const Vector& z) const override {
    Matrix Rt = R(t);
    return Rt.transpose() * child->hess(t, Rt * z) * Rt;
  }
  Matrix quad_A(double t) const override {
    Matrix Rt = R(t);
    return Rt.transpose() * child->quad_A(t) * Rt;
  }
  std::optional<std::vector<double>> quad_diag_angles() const override {
    // Conjugating a per-plane diagonal quadratic by a per-plane rotation
    // leaves it unchanged.
    return child->quad_diag_angles();
  }
  double h_sup() const override { return child->h_sup(); }
  double grad_h_sup() const override { return child->grad_h_sup(); }
  bool flow_defined() const override { return child->flow_defined(); }
  std::vector<double> breakpoints() const override {
    return child->breakpoints();
  }
};

}  // namespace

double radial_gprime(double theta0, double theta_inf, double u_a, double u_b,
                     double u) {
  if (u <= u_a) return 0.5 * theta0;
  if (u >= u_b) return 0.5 * theta_inf;
  return 0.5 * theta0 +
         0.5 * (theta_inf - theta0) * p5((u - u_a) / (u_b - u_a));
}

double radial_g(double theta0, double theta_inf, double u_a, double u_b,
                double u) {
  if (u <= u_a) return 0.5 * theta0 * u;
  double w = u_b - u_a;
  double base = 0.5 * theta0 * u_a;
  if (u <= u_b) {
    double x = (u - u_a) / w;
    return base + 0.5 * theta0 * (u - u_a) +
           0.5 * (theta_inf - theta0) * w * p5I(x);
  }
  double full = base + 0.5 * theta0 * w + 0.5 * (theta_inf - theta0) * w * p5I(1.0);
  return full + 0.5 * theta_inf * (u - u_b);
}

AsymQuadHamiltonian AsymQuadHamiltonian::diagonal(std::vector<double> angles,
                                                  std::vector<Bump> bumps) {
  auto node = std::make_shared<BaseHam>();
  node->n = static_cast<int>(angles.size());
  if (node->n < 1) throw ValidationError("diagonal: empty angle list");
  node->angles = std::move(angles);
  for (const Bump& b : bumps) {
    if (b.center.size() != 2 * node->n || b.width <= 0.0) {
      throw ValidationError("diagonal: bump dimension/width invalid");
    }
  }
  node->bumps = std::move(bumps);
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::general(std::vector<Matrix> A_samples,
                                                 std::vector<Bump> bumps) {
  if (A_samples.empty()) throw ValidationError("general: no quadratic samples");
  auto node = std::make_shared<BaseHam>();
  node->n = static_cast<int>(A_samples.front().rows()) / 2;
  for (Matrix& A : A_samples) {
    if (A.rows() != 2 * node->n || A.cols() != 2 * node->n) {
      throw ValidationError("general: sample dimension mismatch");
    }
    if ((A - A.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
      throw ValidationError("general: quadratic sample not symmetric");
    }
    A = Matrix(0.5 * (A + A.transpose().eval()));
  }
  node->A_samples = std::move(A_samples);
  node->bumps = std::move(bumps);
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::zero(int n) {
  return quad_diag(std::vector<double>(n, 0.0));
}

AsymQuadHamiltonian AsymQuadHamiltonian::quad_diag(std::vector<double> angles) {
  return diagonal(std::move(angles), {});
}

AsymQuadHamiltonian AsymQuadHamiltonian::radial(double theta0,
                                                double theta_inf, double u_a,
                                                double u_b) {
  if (!(u_b > u_a && u_a >= 0.0)) {
    throw ValidationError("radial: need 0 <= u_a < u_b");
  }
  auto node = std::make_shared<RadialHam>();
  node->n = 1;
  node->theta0 = theta0;
  node->theta_inf = theta_inf;
  node->u_a = u_a;
  node->u_b = u_b;
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::iterate(const AsymQuadHamiltonian& H,
                                                 int k) {
  if (k < 1) throw ValidationError("iterate: k >= 1 required");
  if (k == 1) return H;
  auto node = std::make_shared<TimeScaleHam>();
  node->n = H.n();
  node->k = k;
  node->child = H.impl();
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::concat(const AsymQuadHamiltonian& F,
                                                const AsymQuadHamiltonian& G) {
  if (F.n() != G.n()) throw ValidationError("concat: dimension mismatch");
  auto node = std::make_shared<ConcatHam>();
  node->n = F.n();
  node->F = F.impl();
  node->G = G.impl();
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::sum(
    std::vector<AsymQuadHamiltonian> parts) {
  if (parts.empty()) throw ValidationError("sum: empty part list");
  auto node = std::make_shared<SumHam>();
  node->n = parts.front().n();
  for (auto& p : parts) {
    if (p.n() != node->n) throw ValidationError("sum: dimension mismatch");
    node->parts.push_back(p.impl());
  }
  return AsymQuadHamiltonian(node);
}

AsymQuadHamiltonian AsymQuadHamiltonian::unitary_frame(
    std::vector<double> rates, const AsymQuadHamiltonian& H) {
  if (static_cast<int>(rates.size()) != H.n()) {
    throw ValidationError("unitary_frame: rate count must equal n");
  }
  auto node = std::make_shared<FrameHam>();
  node->n = H.n();
  node->rates = std::move(rates);
  node->child = H.impl();
  return AsymQuadHamiltonian(node);
}

}  // namespace symplab
