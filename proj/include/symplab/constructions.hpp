// Index re-normalization machinery: winding loops that shift the index at
// infinity, re-indexed Hamiltonians with prescribed asymptotics, non-resonant
// homotopies of diagonal quadratic forms, the slow radial interpolation K,
// and the matched Hamiltonian pair (F, G) with a certified uniform-distance
// bound.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "symplab/flow.hpp"
#include "symplab/hamiltonian.hpp"
#include "symplab/orbits.hpp"

namespace symplab {

// Autonomous quadratic P(z) = 1/2 sum_r 2 pi m_r |z_r|^2 whose linear flow is
// a loop; maslov holds the verified loop index (= sum m_r in our convention).
struct LoopQuadratic {
  std::vector<long long> m;
  long long maslov = 0;
  AsymQuadHamiltonian hamiltonian() const;
};

// Data of the interpolation between the residual quadratic form R ^ Q^{xl}
// (s = 0) and 0 ^ Q^{xl} (s = 1): per-plane homotopy angles, nondegeneracy
// and slope constants, and the capped radial profile chi.
struct InterpolationProfile {
  int n = 1;
  int l = 1;
  double R0 = 0.0;
  double R1 = 0.0;
  double C0 = 0.0;  // min over the s-grid of sigma_min(M^s_1 - I)
  double C1 = 0.0;  // max finite-difference norm of d/ds of the generator
  std::vector<double> alpha;   // per-plane angles of Q at infinity
  std::vector<double> beta;    // chosen homotopy angles, |beta_r| < 2 pi
  std::vector<int> branch;     // 0 = direct arc, +/-1 = complementary arc
  // Sampled (u, chi(u), chi'(u)) with u = |z|^2.
  std::vector<std::array<double, 3>> chi_knots;
  // Normalization of the capped profile chi' = lambda * g(u) * C0/(C1 u).
  double lambda = 0.0;
};

// sigma = ind_inf(H^{xk}) - ind_inf(H^{xl}) (always even), mu = sigma / 2.
// Checks |sigma - (k - l) * mean ind_inf(H)| <= 2n.
std::pair<long long, long long> sigma_and_mu(const AsymQuadHamiltonian& H,
                                             int k, int l);

// Winding loop with verified Maslov index exactly mu: per-plane windings
// floor((k - l) alpha_r / (2 pi)), then an integer correction on the first
// plane so the loop index matches mu.
LoopQuadratic build_Pmu(const AsymQuadHamiltonian& H, int k, int l,
                        long long mu);

// The re-indexed Hamiltonian (Pbar^mu # H^{x(k-l)}) ^ H^{xl}: time-1 map
// phi^k_H, index at infinity of H^{xl}, actions scaled by k.
AsymQuadHamiltonian reindex(const AsymQuadHamiltonian& H, int k, int l);

// Non-resonant homotopy between the residual form R ^ Q^{xl} and 0 ^ Q^{xl},
// with the capped interpolation profile chi supported on [R0^2, R1^2].
InterpolationProfile nonresonant_homotopy(const AsymQuadHamiltonian& H, int k,
                                          int l, double R0);

// R1 = exp(5 C1 / (4 C0)) * R0.
double interpolation_outer_radius(double R0, double C0, double C1);

// The interpolation Hamiltonian K(t,z) = 1/2 <A^{chi(|z|^2)}_t z, z>.
// Its flow conserves |z| and it has no nontrivial 1-periodic orbits.
AsymQuadHamiltonian build_K(const InterpolationProfile& profile);

// Per fixed point: the record for phi^k_H and the transported values on F.
struct PipelineFixedPoint {
  Vector z;
  double action_k = 0.0;   // action as a fixed point of H^{xk}
  double action_F = 0.0;   // action as a fixed point of F
  long long cz_k = 0;      // index as a fixed point of H^{xk}
  long long cz_F = 0;      // index as a fixed point of F
  double residual_F = 0.0; // |phi^1_F(z) - z|
};

struct PipelinePair {
  AsymQuadHamiltonian G;  // 0 ^ H^{xl}
  AsymQuadHamiltonian F;  // K + bounded part of the re-indexed Hamiltonian
  int k = 0;
  int l = 0;
  long long sigma = 0;
  long long mu = 0;
  double R0 = 0.0;
  double R1 = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double shift_bound = 0.0;     // 4 (k-l) ||h||_inf + 8 pi R1^2
  double shift_measured = 0.0;  // max |F - G| over a dense sample
  std::vector<PipelineFixedPoint> fixed_points;
  InterpolationProfile profile;
};

// Builds (F, G), verifies the fixed-point transport (indices shifted by
// sigma, actions preserved, no extra fixed points of F inside 2 R1) and
// measures the uniform distance |F - G|. R0 = 0 selects the default radius
// (1.5 x the enclosing radius of the found orbits, at least the certified
// a-priori radius); an explicit R0 with an orbit within 1.1 R0 of the
// boundary is rejected.
PipelinePair build_pipeline_pair(const AsymQuadHamiltonian& H, int k, int l,
                                 double R0 = 0.0);

}  // namespace symplab
