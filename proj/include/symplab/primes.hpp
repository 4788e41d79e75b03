// Uniformly non-resonant prime iterates of a unitary symplectic matrix:
// classify rotation numbers into rational / rationally-dependent / free
// irrational parts, then sieve for primes p whose multiples p*a stay away
// from 0 on the torus simultaneously for every rotation number a. For such
// p the spectrum of M^p keeps a uniform chord distance from 1.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "symplab/common.hpp"

namespace symplab {

// Reduced fraction num/den (den > 0).
struct Fraction {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / den; }
};

// Decomposition of normalized rotation numbers a = alpha / 2pi into
// rational ones, a Q-independent generating set, and relation rows
// expressing the remaining irrationals over the generators.
struct AngleClassification {
  std::vector<Fraction> rational;             // orders are the denominators
  std::vector<double> irrational_generators;  // Q-independent a_1..a_q
  // One row per dependent irrational angle: value = sum_j row[j] * a_j
  // + offset (mod 1). Coefficients found by a bounded-height search.
  struct Relation {
    std::vector<Fraction> coeffs;
    Fraction offset;
    double value = 0.0;  // the dependent angle itself
  };
  std::vector<Relation> relations;
  // Angles whose best rational approximation error lands within a factor 10
  // of the tolerance: recorded, never silently resolved either way.
  std::vector<double> ambiguous;
  double tolerance = 0.0;
  long long max_denominator = 0;

  int rank() const { return static_cast<int>(irrational_generators.size()); }
};

struct GapEntry {
  std::size_t j = 0;
  int m = 1;
  double ratio = 0.0;  // (p_{j+m} - p_j) / p_j
};

struct NonResonantSequence {
  std::vector<std::uint64_t> primes;  // strictly increasing
  double c = 0.0;                     // chord-distance threshold, 2 sin(pi e)
  double e = 0.0;                     // torus-distance threshold
  double density_estimate = 0.0;      // |primes| / pi(N)
  std::vector<GapEntry> gap_table;
  std::uint64_t N = 0;
  std::uint64_t pi_N = 0;
};

struct PrimeStatistics {
  double density_estimate = 0.0;
  // Per decade of j (log10 scale): {decade index, median gap ratio, count}.
  std::vector<std::array<double, 3>> gap_decades;
  double star_discrepancy = 0.0;  // max over angles of D*(p*a mod 1)
  double torus_measure = 0.0;     // Monte-Carlo measure of the admissible set
  double torus_measure_se = 0.0;  // binomial standard error of the above
  std::uint64_t mc_samples = 0;
};

// Continued-fraction rationality test plus bounded integer-relation search.
// tol >= 1e-10 required. Angles are normalized rotation numbers in units of
// full turns; any real input is reduced mod 1.
AngleClassification classify_angles(const std::vector<double>& angles,
                                    double tol = 1e-9,
                                    long long max_denominator = 1000000);

// Sieve primes up to N and keep those that (1) exceed every prime factor of
// the rational orders and (2) keep dist(p*a mod 1, 0) > e for every
// irrational angle (generators and relation rows alike). Throws
// NumericalError naming the largest feasible e when the result is empty.
NonResonantSequence search_primes(const AngleClassification& cls, double e,
                                  std::uint64_t N);

// Density, per-decade gap-ratio medians, star discrepancy of the prime
// multiples, and a Monte-Carlo estimate of the admissible torus measure.
PrimeStatistics statistics(const NonResonantSequence& seq,
                           const AngleClassification& cls, int window_m = 1);

// Chord distance from 1 of the p-th power of M (repeated squaring with
// symplectic renormalization); used for direct spot checks of the sequence.
double power_distance_to_one(const Matrix& M, std::uint64_t p);

}  // namespace symplab
