// Sampled paths in Sp(2n) starting at the identity: storage, interpolation,
// periodic extension / iteration, pointwise products, and the continuous
// winding of the polar-factor determinant argument that underlies all index
// computations.
#pragma once

#include <functional>
#include <optional>

#include "symplab/common.hpp"
#include "symplab/linalg.hpp"

namespace symplab {

struct SymplecticPath {
  int n = 1;
  std::vector<double> times;    // increasing, times[0] = 0, times.back() = 1
  std::vector<Matrix> samples;  // M(t_i); samples[0] = I
  // Present when the path is the diagonal unitary flow t -> (+)_r e^{-i a_r t}.
  std::optional<std::vector<double>> diagonal_angles;
  // Optional symmetric generator family A(t) with Mdot = -J0 A(t) M.
  std::function<Matrix(double)> generator;

  const Matrix& endpoint() const { return samples.back(); }
  // |det(M(1) - I)|, the nondegeneracy margin at the endpoint.
  double endpoint_margin() const;
  // Geodesic interpolation between adjacent samples:
  // M(t) = M_i exp(tau * log(M_i^{-1} M_{i+1})).
  Matrix eval(double t) const;
  // Value of the 1-periodic extension M(t + j) = M(t) M(1)^j for t in [0, k].
  Matrix eval_extended(double t) const;
  // Structural validation (identity start, symplectic samples at tol 1e-6,
  // time ordering). Throws ValidationError.
  void validate() const;
};

// Path of the diagonal unitary flow with the given angles (radians per unit
// time); sample density adapted to the total rotation.
SymplecticPath path_from_diagonal(const std::vector<double>& angles,
                                  int min_samples = 64);

// Path generated by a constant symmetric generator A: t -> exp(-t J0 A).
SymplecticPath path_from_constant_generator(const Matrix& A,
                                            int min_samples = 64);

// The k-th iterate M^{xk}(t) = M(kt) of the periodic extension.
SymplecticPath iterate_path(const SymplecticPath& path, int k);

// Pointwise product t -> P(t) * Q(t) on the union sample grid (used to
// compose loops with paths in the loop-composition identity).
SymplecticPath pointwise_product(const SymplecticPath& P,
                                 const SymplecticPath& Q);

// Pointwise multiplicative end-perturbation M(t) * R(eps * eta(t)) with eta
// the smoothstep ramp on [0.8, 1] and R a rotation by equal angle in every
// symplectic coordinate plane (used by the lsc extension).
SymplecticPath end_perturbed(const SymplecticPath& path, double eps);

// Total continuous increment of w(t) = -arg det_C(polar factor of M(t)) along
// the path, tracked with adaptive bisection so no step jumps by more than
// pi/2; throws NumericalError("refinement-needed ...") if the interpolated
// path cannot be refined to that resolution.
double polar_winding(const SymplecticPath& path);

// Same quantity along the explicit path tau -> exp(tau * L), tau in [0,1].
double polar_winding_exp(const Matrix& L);

}  // namespace symplab
