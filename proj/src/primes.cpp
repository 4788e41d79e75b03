#include "symplab/primes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "symplab/linalg.hpp"

namespace symplab {

namespace {

double frac_part(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

// Distance to the nearest integer.
double torus_dist(double x) {
  double f = frac_part(x);
  return std::min(f, 1.0 - f);
}

// Best rational approximation p/q with q <= max_den via continued-fraction
// convergents; returns the approximation error through *err.
Fraction best_rational(double x, long long max_den, double* err) {
  double f = frac_part(x);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = f;
  long long ip = 0;
  Fraction best{0, 1};
  double best_err = std::abs(f);
  for (int it = 0; it < 64; ++it) {
    ip = static_cast<long long>(std::floor(y));
    long long p2 = ip * p1 + p0, q2 = ip * q1 + q0;
    if (q2 > max_den || q2 <= 0) break;
    double cand_err = std::abs(f - static_cast<double>(p2) / q2);
    if (cand_err < best_err) {
      best = Fraction{p2, q2};
      best_err = cand_err;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double r = y - ip;
    if (r < 1e-15) break;
    y = 1.0 / r;
  }
  *err = best_err;
  return best;
}

// Simple sieve of Eratosthenes in fixed-size segments.
std::vector<std::uint64_t> sieve_primes(std::uint64_t N) {
  std::vector<std::uint64_t> primes;
  if (N < 2) return primes;
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)N)) + 1;
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }
  const std::uint64_t seg = 1 << 18;
  std::vector<char> mark(seg);
  for (std::uint64_t lo = 2; lo <= N; lo += seg) {
    std::uint64_t hi = std::min(N, lo + seg - 1);
    std::fill(mark.begin(), mark.begin() + (hi - lo + 1), 1);
    for (std::uint64_t q : base) {
      if (q * q > hi) break;
      std::uint64_t start = std::max(q * q, ((lo + q - 1) / q) * q);
      for (std::uint64_t j = start; j <= hi; j += q) mark[j - lo] = 0;
    }
    for (std::uint64_t i = lo; i <= hi; ++i) {
      if (mark[i - lo]) primes.push_back(i);
    }
  }
  return primes;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q * q <= v; ++q) {
    if (v % q) continue;
    out.push_back(q);
    while (v % q == 0) v /= q;
  }
  if (v > 1) out.push_back(v);
  return out;
}

// All torus rows a prime multiple must keep away from 0: the generators
// themselves plus every dependent angle (whose value already honors its
// relation row).
std::vector<double> irrational_rows(const AngleClassification& cls) {
  std::vector<double> rows = cls.irrational_generators;
  for (const auto& rel : cls.relations) rows.push_back(rel.value);
  return rows;
}

double kept_fraction(const std::vector<std::uint64_t>& primes,
                     std::uint64_t min_factor,
                     const std::vector<double>& rows, double e) {
  std::size_t kept = 0;
  for (std::uint64_t p : primes) {
    if (p <= min_factor) continue;
    bool ok = true;
    for (double a : rows) {
      if (torus_dist(static_cast<double>(p) * a) <= e) {
        ok = false;
        break;
      }
    }
    if (ok) ++kept;
  }
  return primes.empty() ? 0.0 : static_cast<double>(kept) / primes.size();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return (v.size() % 2) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

AngleClassification classify_angles(const std::vector<double>& angles,
                                    double tol, long long max_denominator) {
  if (tol < 1e-10) {
    throw ValidationError("classify_angles: tol must be >= 1e-10");
  }
  if (max_denominator < 2) {
    throw ValidationError("classify_angles: max_denominator must be >= 2");
  }
  AngleClassification cls;
  cls.tolerance = tol;
  cls.max_denominator = max_denominator;

  std::vector<double> irr;
  for (double raw : angles) {
    double a = frac_part(raw);
    double err = 0.0;
    Fraction f = best_rational(a, max_denominator, &err);
    // A true rational stored as a double matches its fraction to rounding
    // error regardless of the denominator, while the best convergent of an
    // irrational only gets within ~1/(den * max_den); scale the acceptance
    // by the denominator so deep convergents (golden ratio) stay irrational.
    double scaled = tol / std::max<double>(1.0, static_cast<double>(f.den));
    if (err < scaled) {
      cls.rational.push_back(f);
    } else if (err < 10.0 * scaled) {
      cls.ambiguous.push_back(a);  // surfaced, not guessed
    } else {
      irr.push_back(a);
    }
  }

  // Bounded-height relation search: x = sum_j (c_j / d) g_j + offset (mod 1)
  // with |c_j| <= height, d <= height, offset rational with a small
  // denominator. Exhaustive over the small box; adequate for the handful of
  // rotation numbers of one matrix.
  const long long height = 8;
  for (double x : irr) {
    const auto& g = cls.irrational_generators;
    bool dependent = false;
    if (!g.empty() && g.size() <= 3) {
      std::vector<long long> c(g.size(), -height);
      while (!dependent) {
        for (long long d = 1; d <= height && !dependent; ++d) {
          double combo = 0.0;
          for (std::size_t j = 0; j < g.size(); ++j) {
            combo += static_cast<double>(c[j]) / d * g[j];
          }
          double rest = x - combo;
          double err = 0.0;
          Fraction off = best_rational(rest, 64, &err);
          if (err < tol) {
            AngleClassification::Relation rel;
            for (std::size_t j = 0; j < g.size(); ++j) {
              long long cg = std::gcd(std::abs(c[j]), d);
              if (cg == 0) cg = 1;
              rel.coeffs.push_back(Fraction{c[j] / cg, d / cg});
            }
            rel.offset = off;
            rel.value = x;
            cls.relations.push_back(std::move(rel));
            dependent = true;
          }
        }
        // Advance the coefficient box counter.
        std::size_t j = 0;
        while (j < c.size() && ++c[j] > height) c[j++] = -height;
        if (j == c.size()) break;
      }
    }
    if (!dependent) cls.irrational_generators.push_back(x);
  }
  return cls;
}

NonResonantSequence search_primes(const AngleClassification& cls, double e,
                                  std::uint64_t N) {
  if (!(e > 0.0 && e < 0.5)) {
    throw ValidationError("search_primes: need 0 < e < 1/2");
  }
  if (N < 1000) throw ValidationError("search_primes: need N >= 10^3");
  for (const Fraction& f : cls.rational) {
    if (f.num == 0) {
      throw ValidationError(
          "search_primes: rotation number 0 is resonant for every iterate");
    }
  }

  std::vector<std::uint64_t> primes = sieve_primes(N);
  std::uint64_t min_factor = 0;
  double rational_gap = 2.0;  // min chord gap of the surviving roots of unity
  for (const Fraction& f : cls.rational) {
    for (std::uint64_t q : prime_factors(static_cast<std::uint64_t>(f.den))) {
      min_factor = std::max(min_factor, q);
    }
    rational_gap =
        std::min(rational_gap, 2.0 * std::sin(kPi / static_cast<double>(f.den)));
  }
  std::vector<double> rows = irrational_rows(cls);

  NonResonantSequence seq;
  seq.e = e;
  seq.N = N;
  seq.pi_N = primes.size();
  for (std::uint64_t p : primes) {
    if (p <= min_factor) continue;
    bool ok = true;
    for (double a : rows) {
      if (torus_dist(static_cast<double>(p) * a) <= e) {
        ok = false;
        break;
      }
    }
    if (ok) seq.primes.push_back(p);
  }

  if (seq.primes.empty()) {
    // Bisect for the largest e keeping at least 1% of the primes.
    double lo = 0.0, hi = e;
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi);
      if (kept_fraction(primes, min_factor, rows, mid) > 0.01) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    std::ostringstream os;
    os << "search_primes: no prime survives e = " << e
       << "; largest feasible e ~= " << lo;
    throw NumericalError(os.str());
  }

  seq.c = 2.0 * std::sin(kPi * e);
  if (rows.empty()) seq.c = rational_gap;
  seq.c = std::min(seq.c, rational_gap);
  seq.density_estimate =
      static_cast<double>(seq.primes.size()) / static_cast<double>(seq.pi_N);
  for (std::size_t j = 0; j + 1 < seq.primes.size(); ++j) {
    seq.gap_table.push_back(
        GapEntry{j, 1,
                 static_cast<double>(seq.primes[j + 1] - seq.primes[j]) /
                     static_cast<double>(seq.primes[j])});
  }
  return seq;
}

PrimeStatistics statistics(const NonResonantSequence& seq,
                           const AngleClassification& cls, int window_m) {
  if (seq.primes.size() < 100) {
    throw ValidationError("statistics: need at least 100 primes");
  }
  if (window_m < 1) throw ValidationError("statistics: window_m must be >= 1");
  PrimeStatistics st;
  st.density_estimate = seq.density_estimate;

  // Gap ratios (p_{j+m} - p_j)/p_j, median per decade of j.
  std::size_t n = seq.primes.size();
  std::size_t decades =
      static_cast<std::size_t>(std::floor(std::log10((double)n))) + 1;
  std::vector<std::vector<double>> buckets(decades);
  for (std::size_t j = 0; j + window_m < n; ++j) {
    double ratio = static_cast<double>(seq.primes[j + window_m] -
                                       seq.primes[j]) /
                   static_cast<double>(seq.primes[j]);
    std::size_t d = static_cast<std::size_t>(std::floor(std::log10(j + 1.0)));
    buckets[std::min(d, decades - 1)].push_back(ratio);
  }
  for (std::size_t d = 0; d < decades; ++d) {
    if (buckets[d].empty()) continue;
    st.gap_decades.push_back(
        {static_cast<double>(d), median(buckets[d]),
         static_cast<double>(buckets[d].size())});
  }

  // Star discrepancy of (p a mod 1), maximum over the irrational rows.
  for (double a : irrational_rows(cls)) {
    std::vector<double> xs;
    xs.reserve(n);
    for (std::uint64_t p : seq.primes) {
      xs.push_back(frac_part(static_cast<double>(p) * a));
    }
    std::sort(xs.begin(), xs.end());
    double d_star = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double up = static_cast<double>(i + 1) / n - xs[i];
      double dn = xs[i] - static_cast<double>(i) / n;
      d_star = std::max({d_star, std::abs(up), std::abs(dn)});
    }
    st.star_discrepancy = std::max(st.star_discrepancy, d_star);
  }

  // Monte-Carlo measure of the admissible torus set: points of the
  // generator torus at which every irrational row keeps distance > e from
  // 0 (relation rows evaluated through their coefficients).
  const std::uint64_t samples = 100000;
  st.mc_samples = samples;
  int q = cls.rank();
  if (q > 0) {
    std::mt19937_64 rng(491);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t good = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
      std::vector<double> t(q);
      for (int j = 0; j < q; ++j) t[j] = unif(rng);
      bool ok = true;
      for (int j = 0; j < q && ok; ++j) ok = torus_dist(t[j]) > seq.e;
      for (const auto& rel : cls.relations) {
        if (!ok) break;
        // A relation row only involves the generators known when it was
        // found; later generators enter with coefficient zero.
        double v = rel.offset.value();
        for (std::size_t j = 0; j < rel.coeffs.size(); ++j) {
          v += rel.coeffs[j].value() * t[j];
        }
        ok = torus_dist(v) > seq.e;
      }
      if (ok) ++good;
    }
    st.torus_measure = static_cast<double>(good) / samples;
    st.torus_measure_se = std::sqrt(
        st.torus_measure * (1.0 - st.torus_measure) / samples);
  } else {
    st.torus_measure = 1.0;  // purely rational spectrum
    st.torus_measure_se = 0.0;
  }
  return st;
}

double power_distance_to_one(const Matrix& M, std::uint64_t p) {
  Matrix W = symplectic_power(M, static_cast<long long>(p));
  return circle_spectrum(W).distance_to_one;
}

}  // namespace symplab
