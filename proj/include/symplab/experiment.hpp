// End-to-end pipeline audit: runs the matched-pair construction at prime
// iterates taken from a non-resonant sequence and records the action-window
// and degree-interval arithmetic that the localization argument relies on,
// plus a planar toy-model census with an integrable radial oracle.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symplab/constructions.hpp"
#include "symplab/cz.hpp"
#include "symplab/orbits.hpp"
#include "symplab/primes.hpp"

namespace symplab {

// Half-open action interval (lo, hi].
struct ActionWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo < x && x <= hi; }
  ActionWindow shifted(double c) const { return {lo + c, hi + c}; }
};

// The central window I = (p (a0 - eps/3), p (a0 + eps/3)], its shifts by the
// continuation cost C and 2C, and the isolating envelope
// (p (a0 - eps), p (a0 + eps)].
struct LedgerWindows {
  ActionWindow I;
  ActionWindow I_plus_C;
  ActionWindow I_plus_2C;
  ActionWindow envelope;
};

LedgerWindows action_windows(double a0, double eps, double p, double C);

// True iff I, I + C and I + 2C all lie inside the envelope and p*a0 belongs
// to all three. Holds exactly when 6C < eps * p.
bool windows_admissible(const LedgerWindows& w, double p_times_a0);

// Degree interval of one fixed point at the lower prime, and whether it
// avoids the distinguished interval delta at the upper prime.
struct GammaRecord {
  Vector z;
  double mean_cz = 0.0;  // mean index of z as a 1-periodic point
  DegreeInterval gamma;
  bool equal_mean = false;  // same mean index as the distinguished point
  bool disjoint = false;    // gamma does not meet delta
};

struct ProofLedger {
  std::size_t j = 0;
  int m = 0;
  std::uint64_t p_j = 0;
  std::uint64_t p_jm = 0;  // p_{j+m}
  long long sigma_jm = 0;
  int n = 1;
  double a0 = 0.0;       // action of the distinguished twist point
  double epsilon = 0.0;  // isolating half-width of the action value a0
  double C = 0.0;        // uniform distance of the matched pair
  bool C_is_measured = false;  // false: C is the certified a-priori bound
  LedgerWindows windows;
  bool windows_ok = false;
  DegreeInterval delta;  // degree interval of the distinguished point
  std::vector<GammaRecord> gammas;
  double mean_cz_z0 = 0.0;
  double mean_ind_inf = 0.0;
  // 3n / |mean_cz_z0 - mean_ind_inf|: prime gaps beyond this value force the
  // equal-mean degree intervals apart.
  double gap_bound = 0.0;
  // Smallest m with 2m >= gap_bound. Since the sequence guarantees the
  // strict gap p_{j+m} - p_j > 2m, this m already pushes the gap past the
  // bound.
  std::optional<long long> m_star;
  bool contradiction_reached = false;
};

// Smallest m >= 1 with 2m >= 3n / mean_gap.
long long equal_mean_m_star(int n, double mean_gap);

// Builds the matched pair (F, G) at iterates k = p_{j+m}, l = p_j and fills
// the ledger: windows around p_{j+m} a0, the degree interval of the
// distinguished twist fixed point (shifted by sigma), and one gamma interval
// per fixed point at the lower prime. Throws ValidationError "j too small"
// when 6C >= eps * p_{j+m}, reporting the minimal admissible j found by a
// certified-bound scan over the rest of the sequence.
std::pair<PipelinePair, ProofLedger> run_pipeline(
    const AsymQuadHamiltonian& H, std::size_t j, int m,
    const NonResonantSequence& seq);

// Ledgers for j in [j_lo, j_hi] at fixed m without building the pairs: C is
// the certified distance bound, so windows may honestly fail while the
// degree-interval analysis (delta, gammas, disjointness) is still exact.
// Pairs whose interpolation homotopy is resonant are skipped.
std::vector<ProofLedger> ledger_scan(const AsymQuadHamiltonian& H,
                                     const NonResonantSequence& seq, int m,
                                     std::size_t j_lo, std::size_t j_hi);

// Plot-ready table: one row per ledger with C/p_j and sigma/p_j columns.
std::string ledger_csv(const std::vector<ProofLedger>& ledgers);

// Planar model: rotation by theta_inf at infinity, inner rotation theta0
// reached either by a radial profile ramp on u = |z|^2 in [u_a, u_b]
// (integrable) or by explicit bumps on the pure rotation.
struct ToyModelSpec {
  double theta0 = 0.0;
  double theta_inf = 0.0;  // must stay away from 2 pi Z
  double u_a = 1.0;
  double u_b = 4.0;
  std::vector<Bump> bumps;  // when non-empty, overrides the radial ramp
  int max_period = 3;
};

// One predicted circle of q-periodic orbits: rotation rate 2 g'(u) = 2 pi
// p / q at squared radius u.
struct ToyOrbitFamily {
  long long p = 0;
  int q = 1;
  double u = 0.0;
  double radius = 0.0;
};

struct ToyCensusReport {
  double theta0 = 0.0;
  double theta_inf = 0.0;
  bool twist = false;
  bool integrable = false;
  std::map<int, std::vector<FixedPointRecord>> census;
  // Distinct orbit classes per primitive period (a circle family counts
  // once, isolated points count individually).
  std::map<int, int> counts;
  // Radial-oracle prediction, integrable case only.
  std::vector<ToyOrbitFamily> oracle;
  std::string note;  // expectation note, present only for twist specs
};

ToyCensusReport toy2d(const ToyModelSpec& spec);

// "period,count" rows of the census.
std::string toy_census_csv(const ToyCensusReport& report);

}  // namespace symplab
