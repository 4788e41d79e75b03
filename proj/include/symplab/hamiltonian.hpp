// Asymptotically quadratic Hamiltonians H = Q + h on R^{2n}: a quadratic
// part at infinity (diagonal angles or a general 1-periodic symmetric family)
// plus a finite sum of Gaussian bumps with trig-polynomial coefficients, and
// the closed-form node algebra (time scaling, concatenation, unitary frames,
// interpolated quadratics, radial profiles) in which every pipeline
// construction keeps analytic values, gradients and Hessians.
#pragma once

#include <memory>
#include <optional>

#include "symplab/common.hpp"
#include "symplab/linalg.hpp"

namespace symplab {

// Finite trigonometric polynomial c(t) = c0 + sum_k (a_k cos 2pi k t +
// b_k sin 2pi k t), period 1.
struct TrigPoly {
  double c0 = 0.0;
  std::vector<double> cos_c;  // a_k, k = 1..
  std::vector<double> sin_c;  // b_k, k = 1..
  double eval(double t) const;
  // Certified upper bound |c0| + sum |a_k| + sum |b_k|.
  double sup_bound() const;
};

// Gaussian bump c(t) * exp(-|z - q|^2 / s^2).
struct Bump {
  Vector center;
  double width = 1.0;
  TrigPoly coeff;
};

// Polymorphic Hamiltonian node. All evaluations are pure; shared_ptr-held
// nodes are immutable after construction and freely shareable.
class HamImpl {
 public:
  virtual ~HamImpl() = default;
  int n = 1;
  virtual double value(double t, const Vector& z) const = 0;
  virtual Vector grad(double t, const Vector& z) const = 0;
  virtual Matrix hess(double t, const Vector& z) const = 0;
  // Symmetric generator A(t) of the quadratic part at infinity.
  virtual Matrix quad_A(double t) const = 0;
  // Per-coordinate angles when the quadratic part is the autonomous diagonal
  // form 1/2 sum alpha_r |z_r|^2.
  virtual std::optional<std::vector<double>> quad_diag_angles() const {
    return std::nullopt;
  }
  // Certified global bounds on |H - Q| and |grad(H - Q)|.
  virtual double h_sup() const = 0;
  virtual double grad_h_sup() const = 0;
  virtual bool flow_defined() const { return false; }
  // Times in (0,1) where the right-hand side is only piecewise smooth
  // (integration restarts there; e.g. the concat junction t = 1/2).
  virtual std::vector<double> breakpoints() const { return {}; }
};

// Value-semantics handle.
class AsymQuadHamiltonian {
 public:
  AsymQuadHamiltonian() = default;
  explicit AsymQuadHamiltonian(std::shared_ptr<const HamImpl> impl)
      : impl_(std::move(impl)) {}

  int n() const { return impl_->n; }
  double value(double t, const Vector& z) const { return impl_->value(t, z); }
  Vector grad(double t, const Vector& z) const { return impl_->grad(t, z); }
  Matrix hess(double t, const Vector& z) const { return impl_->hess(t, z); }
  Matrix quad_A(double t) const { return impl_->quad_A(t); }
  std::optional<std::vector<double>> quad_diag_angles() const {
    return impl_->quad_diag_angles();
  }
  double h_sup() const { return impl_->h_sup(); }
  double grad_h_sup() const { return impl_->grad_h_sup(); }
  bool flow_defined() const { return impl_->flow_defined(); }
  std::vector<double> breakpoints() const { return impl_->breakpoints(); }
  const std::shared_ptr<const HamImpl>& impl() const { return impl_; }
  bool valid() const { return impl_ != nullptr; }

  // --- Factories ---------------------------------------------------------
  // Q diagonal: H = 1/2 sum alpha_r |z_r|^2 + bumps.
  static AsymQuadHamiltonian diagonal(std::vector<double> angles,
                                      std::vector<Bump> bumps = {});
  // Q general: 1-periodic symmetric family from uniform time samples
  // (linearly interpolated, wrapped).
  static AsymQuadHamiltonian general(std::vector<Matrix> A_samples,
                                     std::vector<Bump> bumps = {});
  static AsymQuadHamiltonian zero(int n);
  // Radial planar profile H = g(|z|^2), g'(u) interpolating theta0/2 to
  // theta_inf/2 by a quintic polynomial step on u in [u_a, u_b].
  static AsymQuadHamiltonian radial(double theta0, double theta_inf,
                                    double u_a, double u_b);

  // --- Closed-form combinators --------------------------------------------
  // H^{xk}(t,z) = k H(kt, z).
  static AsymQuadHamiltonian iterate(const AsymQuadHamiltonian& H, int k);
  // (F ^ G)(t) = smooth-step concatenation running G on [0,1/2] then F;
  // time-1 flow is phi1_F o phi1_G.
  static AsymQuadHamiltonian concat(const AsymQuadHamiltonian& F,
                                    const AsymQuadHamiltonian& G);
  // Pointwise sum (children must share n).
  static AsymQuadHamiltonian sum(std::vector<AsymQuadHamiltonian> parts);
  // H evaluated in the rotating unitary frame: (t,z) -> H(t, R(rates*t) z)
  // with R the block rotation flow e^{-i rate_r t} per coordinate plane.
  static AsymQuadHamiltonian unitary_frame(std::vector<double> rates,
                                           const AsymQuadHamiltonian& H);
  // Autonomous diagonal quadratic 1/2 sum theta_r |z_r|^2 (no bumps).
  static AsymQuadHamiltonian quad_diag(std::vector<double> angles);

 private:
  std::shared_ptr<const HamImpl> impl_;
};

// Radial-profile helpers used by the 1D oracle: g'(u) and g(u) for the
// radial factory with the same parameters.
double radial_gprime(double theta0, double theta_inf, double u_a, double u_b,
                     double u);
double radial_g(double theta0, double theta_inf, double u_a, double u_b,
                double u);

}  // namespace symplab
