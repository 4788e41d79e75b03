#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symplab/cz.hpp"
#include "symplab/hamiltonian.hpp"
#include "symplab/ode.hpp"
#include "symplab/path.hpp"

namespace symplab {

struct FlowResult {
  Vector endpoint;
  // Present when requested: t -> dphi^t(z0), sampled at the accepted steps.
  std::optional<SymplecticPath> linearization;
  // (t, z(t)) at the accepted steps.
  std::vector<std::pair<double, Vector>> trajectory;
  double ode_tolerance = 0.0;
  OdeStats stats;
};

// Integrates zdot = -J0 grad H(t,z) from z0 over [0, t1].
FlowResult flow(const AsymQuadHamiltonian& H, const Vector& z0,
                double t1 = 1.0, double tol = 1e-9,
                bool with_linearization = true);

// Generator of the composed flow phi_F o phi_G. When F is a pure diagonal
// quadratic the result keeps closed forms; otherwise it is flow-defined
// (values obtained through inner integrations; no perturbation bounds).
AsymQuadHamiltonian compose(const AsymQuadHamiltonian& F,
                            const AsymQuadHamiltonian& G);

// Generator of the inverse flow (phi_F)^{-1}; always flow-defined.
AsymQuadHamiltonian reverse(const AsymQuadHamiltonian& F);

// Symplectic action of the 1-periodic orbit through the fixed point z0.
double action(const AsymQuadHamiltonian& H, const Vector& z0);

// Time-1 map of the quadratic part, and the full quadratic linear path.
Matrix linear_map_at_infinity(const AsymQuadHamiltonian& H);
SymplecticPath quadratic_flow_path(const AsymQuadHamiltonian& H,
                                   int min_samples = 65);

// For each radius: max over a sphere sample of
// |phi^1_H(z) - phi^1_Q(z)| / |z|.
std::vector<double> sublinearity_diagnostic(const AsymQuadHamiltonian& H,
                                            const std::vector<double>& radii);

struct NondegeneracyCertificate {
  double nu = 0.0;             // spectral gap of d/dt + J0 A at loops
  double delta = 0.0;          // global gradient bound of the bounded part
  double apriori_radius = 0.0; // ball certified to contain every 1-periodic orbit
  std::string method;          // "diagonal_closed_form" or "discretized_operator"
};

NondegeneracyCertificate nondegeneracy_certificate(const AsymQuadHamiltonian& H);

// Index data of the quadratic linear path at infinity.
IndexReport index_at_infinity(const AsymQuadHamiltonian& H);

}  // namespace symplab
