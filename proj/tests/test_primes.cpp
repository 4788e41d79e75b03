#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symplab/linalg.hpp"
#include "symplab/primes.hpp"

using namespace symplab;

namespace {
const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);
}

TEST_CASE("rotation number classification") {
  auto cls = classify_angles({1.0 / 3.0}, 1e-9, 1000000);
  REQUIRE(cls.rational.size() == 1);
  CHECK(cls.rational[0].num == 1);
  CHECK(cls.rational[0].den == 3);
  CHECK(cls.rank() == 0);

  auto cg = classify_angles({kGolden});
  CHECK(cg.rational.empty());
  CHECK(cg.rank() == 1);
  CHECK(cg.relations.empty());

  // {a, 2a, 1/4}: one generator, a doubled dependent, one rational.
  auto cm = classify_angles({kGolden, 2.0 * kGolden, 0.25});
  CHECK(cm.rank() == 1);
  REQUIRE(cm.rational.size() == 1);
  CHECK(cm.rational[0].den == 4);
  REQUIRE(cm.relations.size() == 1);
  REQUIRE(cm.relations[0].coeffs.size() == 1);
  CHECK(cm.relations[0].coeffs[0].value() == doctest::Approx(2.0));
  // The recorded row reproduces the dependent angle modulo 1.
  double recon = cm.relations[0].coeffs[0].value() * kGolden +
                 cm.relations[0].offset.value();
  double dev = std::abs(recon - std::fmod(2.0 * kGolden, 1.0));
  CHECK(std::min(dev, std::abs(dev - 1.0)) < 1e-9);

  CHECK_THROWS_AS(classify_angles({0.5}, 1e-11), ValidationError);
}

TEST_CASE("purely rational spectrum: every large prime survives") {
  auto cls = classify_angles({1.0 / 3.0, 1.0 / 4.0});
  auto seq = search_primes(cls, 0.05, 2000);
  // Orders 3 and 4: prime factors {2, 3}; every prime > 3 qualifies.
  REQUIRE(!seq.primes.empty());
  CHECK(seq.primes.front() == 5);
  for (std::size_t i = 0; i + 1 < seq.primes.size(); ++i) {
    CHECK(seq.primes[i] < seq.primes[i + 1]);
  }
  // All primes except 2 and 3 are kept.
  CHECK(seq.primes.size() == seq.pi_N - 2);
  // c is the minimal chord gap among the surviving roots of unity.
  CHECK(seq.c == doctest::Approx(2.0 * std::sin(kPi / 4.0)));
}

TEST_CASE("golden-ratio angle: kept fraction tracks 1 - 2e") {
  auto cls = classify_angles({kGolden});
  auto seq = search_primes(cls, 0.05, 100000);
  CHECK(std::abs(seq.density_estimate - 0.9) < 0.02);
  CHECK(seq.c == doctest::Approx(2.0 * std::sin(kPi * 0.05)));

  // Every kept prime respects the torus threshold (angle arithmetic).
  for (std::uint64_t p : seq.primes) {
    double f = std::fmod(static_cast<double>(p) * kGolden, 1.0);
    CHECK(std::min(f, 1.0 - f) > 0.05);
  }
}

TEST_CASE("monotonicity and rational safety") {
  auto cls = classify_angles({kGolden, 1.0 / 6.0});
  auto big = search_primes(cls, 0.08, 20000);
  auto small = search_primes(cls, 0.03, 20000);
  // Decreasing e never removes a prime.
  std::size_t bi = 0;
  for (std::uint64_t p : big.primes) {
    while (bi < small.primes.size() && small.primes[bi] < p) ++bi;
    REQUIRE(bi < small.primes.size());
    CHECK(small.primes[bi] == p);
  }
  // No kept prime is a multiple of a detected order.
  for (std::uint64_t p : big.primes) CHECK(p % 6 != 0);
  CHECK(big.density_estimate > 0.0);
}

TEST_CASE("infeasible threshold reports the largest feasible one") {
  auto cls = classify_angles({kGolden});
  CHECK_THROWS_WITH_AS(search_primes(cls, 0.4999, 5000),
                       doctest::Contains("feasible"), NumericalError);
  CHECK_THROWS_AS(search_primes(cls, 0.6, 5000), ValidationError);
  CHECK_THROWS_AS(search_primes(cls, 0.1, 100), ValidationError);
  CHECK_THROWS_AS(search_primes(classify_angles({0.0}), 0.1, 5000),
                  ValidationError);
}

TEST_CASE("statistics: density vs torus measure, discrepancy, gap trend") {
  auto cls = classify_angles({kGolden});
  auto seq = search_primes(cls, 0.05, 100000);
  auto st = statistics(seq, cls, 1);

  // Independent Monte-Carlo measure of the admissible set 1 - 2e.
  CHECK(std::abs(st.torus_measure - 0.9) < 5.0 * st.torus_measure_se);
  CHECK(std::abs(st.density_estimate - st.torus_measure) <
        3.0 * st.torus_measure_se);

  // Kept multiples avoid an e-band around 0, so their star discrepancy is
  // at least e; equidistribution keeps the excess small.
  CHECK(st.star_discrepancy >= 0.05 - 1e-9);
  CHECK(st.star_discrepancy < 0.07);

  // Gap ratios shrink along the sequence (relative gaps are o(1)).
  REQUIRE(st.gap_decades.size() >= 3);
  CHECK(st.gap_decades.back()[1] < st.gap_decades.front()[1]);

  // m-composition: gap(j, m) telescopes over the single steps.
  auto st3 = statistics(seq, cls, 3);
  for (std::size_t j = 0; j + 3 < seq.primes.size(); j += 997) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      sum += static_cast<double>(seq.primes[j + i + 1] - seq.primes[j + i]);
    }
    CHECK(sum == static_cast<double>(seq.primes[j + 3] - seq.primes[j]));
  }

  CHECK_THROWS_AS(statistics(search_primes(cls, 0.3, 1000), cls, 1),
                  ValidationError);
}

TEST_CASE("matrix spot check: powers of the rotation stay away from one") {
  auto cls = classify_angles({kGolden});
  auto seq = search_primes(cls, 0.05, 100000);
  Matrix M = block_rotation({kTwoPi * kGolden});
  std::mt19937 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, seq.primes.size() - 1);
  for (int s = 0; s < 50; ++s) {
    std::uint64_t p = seq.primes[pick(rng)];
    CHECK(power_distance_to_one(M, p) > seq.c);
  }
}
