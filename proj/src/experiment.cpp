#include "symplab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "symplab/flow.hpp"

namespace symplab {

namespace {

constexpr double kEqualMeanTol = 1e-6;
// Pairs whose interpolation annulus would span more than this radius ratio
// are treated as numerically out of reach: the certified distance bound
// stands in for the measured one and the pair is reported inadmissible.
constexpr double kMaxRadiusRatio = 64.0;

int checked_prime(const NonResonantSequence& seq, std::size_t idx) {
  if (idx >= seq.primes.size()) {
    throw ValidationError("run_pipeline: index " + std::to_string(idx) +
                          " outside the prime sequence (size " +
                          std::to_string(seq.primes.size()) + ")");
  }
  std::uint64_t p = seq.primes[idx];
  if (p > static_cast<std::uint64_t>(std::numeric_limits<int>::max() / 4)) {
    throw ValidationError("run_pipeline: prime too large for the flow stage");
  }
  return static_cast<int>(p);
}

// Half-width isolating a0 in the measured action spectrum: 90% of half the
// minimal gap. A lone action value is isolated by any radius; 1 is used.
double isolating_epsilon(const std::vector<FixedPointRecord>& fps) {
  std::vector<double> actions;
  actions.reserve(fps.size());
  for (const auto& r : fps) actions.push_back(r.action);
  std::sort(actions.begin(), actions.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < actions.size(); ++i) {
    double g = actions[i] - actions[i - 1];
    if (g > 1e-9) gap = std::min(gap, g);
  }
  if (!std::isfinite(gap)) return 1.0;
  return 0.9 * 0.5 * gap;
}

// Certified stand-in for the uniform distance of the pair at iterates
// (k, l), used when measuring it is out of reach.
double certified_shift_bound(const AsymQuadHamiltonian& H, int k, int l,
                             double R0) {
  InterpolationProfile prof = nonresonant_homotopy(H, k, l, R0);
  return 4.0 * (k - l) * H.h_sup() + 8.0 * kPi * prof.R1 * prof.R1;
}

}  // namespace

LedgerWindows action_windows(double a0, double eps, double p, double C) {
  if (!(eps > 0.0) || !(p > 0.0) || C < 0.0) {
    throw ValidationError("action_windows: need eps > 0, p > 0, C >= 0");
  }
  LedgerWindows w;
  w.I = {p * (a0 - eps / 3.0), p * (a0 + eps / 3.0)};
  w.I_plus_C = w.I.shifted(C);
  w.I_plus_2C = w.I.shifted(2.0 * C);
  w.envelope = {p * (a0 - eps), p * (a0 + eps)};
  return w;
}

bool windows_admissible(const LedgerWindows& w, double p_times_a0) {
  auto inside = [&](const ActionWindow& a) {
    return w.envelope.lo < a.lo && a.hi <= w.envelope.hi;
  };
  bool contained =
      inside(w.I) && inside(w.I_plus_C) && inside(w.I_plus_2C);
  bool member = w.I.contains(p_times_a0) && w.I_plus_C.contains(p_times_a0) &&
                w.I_plus_2C.contains(p_times_a0);
  return contained && member;
}

long long equal_mean_m_star(int n, double mean_gap) {
  if (n < 1 || !(mean_gap > 0.0)) {
    throw ValidationError("equal_mean_m_star: need n >= 1 and mean_gap > 0");
  }
  double bound = 3.0 * n / mean_gap;
  long long m = static_cast<long long>(std::ceil(bound / 2.0));
  return std::max<long long>(1, m);
}

namespace {

// The measured census of the generating Hamiltonian together with the
// distinguished twist point and the derived isolating constants; shared by
// run_pipeline and ledger_scan.
struct CensusContext {
  std::vector<FixedPointRecord> fps;
  std::size_t z0 = 0;  // index of the distinguished point in fps
  double mean_ind = 0.0;
  double a0 = 0.0;
  double eps = 0.0;
  double R0 = 0.0;  // interpolation inner radius, fixed once per H
};

CensusContext census_context(const AsymQuadHamiltonian& H) {
  if (!H.valid()) throw ValidationError("run_pipeline: empty Hamiltonian");
  CensusContext ctx;
  ctx.fps = find_fixed_points(H, SearchConfig{});
  if (ctx.fps.empty()) {
    throw NumericalError("run_pipeline: no fixed points found");
  }
  ctx.mean_ind = index_at_infinity(H).mean;

  // Distinguished point: the twist fixed point farthest from the mean index
  // at infinity.
  bool found = false;
  for (std::size_t i = 0; i < ctx.fps.size(); ++i) {
    const auto& r = ctx.fps[i];
    if (!r.twist) continue;
    if (!found || std::abs(r.mean_cz - ctx.mean_ind) >
                      std::abs(ctx.fps[ctx.z0].mean_cz - ctx.mean_ind)) {
      ctx.z0 = i;
      found = true;
    }
  }
  if (!found) {
    throw ValidationError(
        "run_pipeline: no twist fixed point (every mean index matches the "
        "index at infinity)");
  }
  ctx.a0 = ctx.fps[ctx.z0].action;
  ctx.eps = isolating_epsilon(ctx.fps);

  // The inner radius only has to enclose the (finitely many) fixed points,
  // and keeping it independent of the iterate preserves the O(p_{j+m} - p_j)
  // scaling of the pair distance.
  double enclosing = 0.0;
  for (const auto& r : ctx.fps) enclosing = std::max(enclosing, r.z.norm());
  ctx.R0 = std::max(1.5 * enclosing, 1.0);
  return ctx;
}

ProofLedger assemble_ledger(const CensusContext& ctx, std::size_t j, int m,
                            int l, int k, long long sigma, double C,
                            bool measured, int n) {
  ProofLedger ledger;
  ledger.j = j;
  ledger.m = m;
  ledger.p_j = static_cast<std::uint64_t>(l);
  ledger.p_jm = static_cast<std::uint64_t>(k);
  ledger.sigma_jm = sigma;
  ledger.n = n;
  ledger.a0 = ctx.a0;
  ledger.epsilon = ctx.eps;
  ledger.C = C;
  ledger.C_is_measured = measured;
  const double p_upper = static_cast<double>(k);
  ledger.windows = action_windows(ctx.a0, ctx.eps, p_upper, C);
  ledger.windows_ok = windows_admissible(ledger.windows, p_upper * ctx.a0);
  const double mean0 = ctx.fps[ctx.z0].mean_cz;
  ledger.mean_cz_z0 = mean0;
  ledger.mean_ind_inf = ctx.mean_ind;
  ledger.delta = degree_support_interval(p_upper * mean0, n, sigma);

  bool all_disjoint = true;
  for (const auto& r : ctx.fps) {
    GammaRecord g;
    g.z = r.z;
    g.mean_cz = r.mean_cz;
    g.gamma =
        degree_support_interval(static_cast<double>(l) * r.mean_cz, n, 0);
    g.equal_mean = std::abs(r.mean_cz - mean0) <= kEqualMeanTol;
    g.disjoint = !ledger.delta.intersects(g.gamma);
    all_disjoint = all_disjoint && g.disjoint;
    ledger.gammas.push_back(std::move(g));
  }

  const double twist_gap = std::abs(mean0 - ctx.mean_ind);
  ledger.gap_bound = 3.0 * n / twist_gap;
  ledger.m_star = equal_mean_m_star(n, twist_gap);
  ledger.contradiction_reached = ledger.windows_ok && all_disjoint;
  return ledger;
}

}  // namespace

std::pair<PipelinePair, ProofLedger> run_pipeline(
    const AsymQuadHamiltonian& H, std::size_t j, int m,
    const NonResonantSequence& seq) {
  if (m < 1) throw ValidationError("run_pipeline: m must be >= 1");
  const int l = checked_prime(seq, j);
  const int k = checked_prime(seq, j + static_cast<std::size_t>(m));
  const int n = H.n();
  const CensusContext ctx = census_context(H);

  // Measure the pair distance when the annulus is tractable, otherwise fall
  // back on the certified bound (which can only make the test below fail).
  PipelinePair pair;
  double C;
  bool measured = false;
  const InterpolationProfile probe = nonresonant_homotopy(H, k, l, ctx.R0);
  const double ratio = interpolation_outer_radius(1.0, probe.C0, probe.C1);
  if (ratio <= kMaxRadiusRatio) {
    pair = build_pipeline_pair(H, k, l, ctx.R0);
    C = pair.shift_measured;
    measured = true;
  } else {
    C = certified_shift_bound(H, k, l, ctx.R0);
  }

  const double p_upper = static_cast<double>(k);
  if (!(6.0 * C < ctx.eps * p_upper)) {
    // Scan the remaining sequence for the first index whose certified bound
    // already clears the window condition.
    std::optional<std::size_t> admissible;
    for (std::size_t jj = j + 1;
         jj + static_cast<std::size_t>(m) < seq.primes.size(); ++jj) {
      const int ll = checked_prime(seq, jj);
      const int kk = checked_prime(seq, jj + static_cast<std::size_t>(m));
      double bound;
      try {
        bound = certified_shift_bound(H, kk, ll, ctx.R0);
      } catch (const NumericalError&) {
        continue;  // resonant pair, not admissible
      }
      if (6.0 * bound < ctx.eps * static_cast<double>(kk)) {
        admissible = jj;
        break;
      }
    }
    std::ostringstream os;
    os << "run_pipeline: j too small: 6C = " << 6.0 * C
       << (measured ? " (measured)" : " (certified bound)")
       << " >= eps * p = " << ctx.eps * p_upper << ";";
    if (admissible) {
      os << " minimal admissible j by certified-bound scan: " << *admissible;
    } else {
      os << " no admissible j within the sequence horizon";
    }
    throw ValidationError(os.str());
  }

  ProofLedger ledger =
      assemble_ledger(ctx, j, m, l, k, pair.sigma, C, measured, n);
  return {std::move(pair), std::move(ledger)};
}

std::vector<ProofLedger> ledger_scan(const AsymQuadHamiltonian& H,
                                     const NonResonantSequence& seq, int m,
                                     std::size_t j_lo, std::size_t j_hi) {
  if (m < 1) throw ValidationError("ledger_scan: m must be >= 1");
  if (j_hi < j_lo) throw ValidationError("ledger_scan: empty index range");
  checked_prime(seq, j_hi + static_cast<std::size_t>(m));
  const CensusContext ctx = census_context(H);
  const int n = H.n();

  std::vector<ProofLedger> out;
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    const int l = checked_prime(seq, j);
    const int k = checked_prime(seq, j + static_cast<std::size_t>(m));
    double C;
    try {
      C = certified_shift_bound(H, k, l, ctx.R0);
    } catch (const NumericalError&) {
      continue;  // resonant homotopy at this pair
    }
    const long long sigma = sigma_and_mu(H, k, l).first;
    out.push_back(assemble_ledger(ctx, j, m, l, k, sigma, C, false, n));
  }
  return out;
}

std::string ledger_csv(const std::vector<ProofLedger>& ledgers) {
  std::ostringstream os;
  os << "j,m,p_j,p_jm,C,C_over_pj,sigma,sigma_over_pj,epsilon,"
        "windows_ok,contradiction\n";
  for (const auto& L : ledgers) {
    double pj = static_cast<double>(L.p_j);
    os << L.j << ',' << L.m << ',' << L.p_j << ',' << L.p_jm << ',' << L.C
       << ',' << L.C / pj << ',' << L.sigma_jm << ','
       << static_cast<double>(L.sigma_jm) / pj << ',' << L.epsilon << ','
       << (L.windows_ok ? 1 : 0) << ',' << (L.contradiction_reached ? 1 : 0)
       << '\n';
  }
  return os.str();
}

namespace {

long long gcdll(long long a, long long b) { return std::gcd(a, b); }

// Solve 2 g'(u) = rate on the monotone ramp [u_a, u_b] by bisection.
double ramp_preimage(double theta0, double theta_inf, double u_a, double u_b,
                     double rate) {
  const bool increasing = theta_inf > theta0;
  double lo = u_a, hi = u_b;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = 2.0 * radial_gprime(theta0, theta_inf, u_a, u_b, mid);
    if ((v < rate) == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ToyCensusReport toy2d(const ToyModelSpec& spec) {
  const double turns = spec.theta_inf / kTwoPi;
  if (std::abs(turns - std::round(turns)) < 1e-9) {
    throw ValidationError(
        "toy2d: rotation at infinity is a full turn; the linear map at "
        "infinity must differ from the identity");
  }
  if (spec.max_period < 1) {
    throw ValidationError("toy2d: max_period must be >= 1");
  }

  ToyCensusReport report;
  report.theta0 = spec.theta0;
  report.theta_inf = spec.theta_inf;
  report.integrable = spec.bumps.empty();

  AsymQuadHamiltonian H;
  double search_radius = 3.0;
  if (!spec.bumps.empty()) {
    H = AsymQuadHamiltonian::diagonal({spec.theta_inf}, spec.bumps);
  } else if (std::abs(spec.theta0 - spec.theta_inf) < 1e-12) {
    H = AsymQuadHamiltonian::diagonal({spec.theta_inf});
  } else {
    if (!(spec.u_a > 0.0) || !(spec.u_b > spec.u_a)) {
      throw ValidationError("toy2d: need 0 < u_a < u_b for the radial ramp");
    }
    H = AsymQuadHamiltonian::radial(spec.theta0, spec.theta_inf, spec.u_a,
                                    spec.u_b);
    search_radius = 1.2 * std::sqrt(spec.u_b);
  }

  SearchConfig cfg;
  cfg.radius = search_radius;
  report.census = periodic_census(H, spec.max_period, cfg);

  for (const auto& [period, recs] : report.census) {
    int classes = 0;
    std::vector<int> seen_families;
    for (const auto& r : recs) {
      if (r.primitive_period != period) continue;
      if (r.family < 0) {
        ++classes;
      } else if (std::find(seen_families.begin(), seen_families.end(),
                           r.family) == seen_families.end()) {
        seen_families.push_back(r.family);
        ++classes;
      }
    }
    report.counts[period] = classes;
  }

  // Twist flag of the central fixed point.
  for (const auto& r : report.census.at(1)) {
    if (r.primitive_period == 1 &&
        (report.census.at(1).size() == 1 || r.z.norm() < 1e-6)) {
      report.twist = r.twist;
      break;
    }
  }
  if (report.twist) {
    report.note =
        "inner and asymptotic rotation rates differ: every rational rate "
        "between them carries a periodic circle";
  }

  // Integrable oracle: circles of q-periodic orbits where the rotation rate
  // 2 g'(u) crosses 2 pi p / q.
  if (report.integrable &&
      std::abs(spec.theta0 - spec.theta_inf) >= 1e-12) {
    const double lo = std::min(spec.theta0, spec.theta_inf);
    const double hi = std::max(spec.theta0, spec.theta_inf);
    for (int q = 1; q <= spec.max_period; ++q) {
      long long p_lo =
          static_cast<long long>(std::floor(lo * q / kTwoPi)) - 1;
      long long p_hi =
          static_cast<long long>(std::ceil(hi * q / kTwoPi)) + 1;
      for (long long p = p_lo; p <= p_hi; ++p) {
        if (p == 0) continue;  // a zero rate carries no closed circle
        double rate = kTwoPi * static_cast<double>(p) / q;
        if (!(rate > lo && rate < hi)) continue;
        if (gcdll(std::llabs(p), q) != 1) continue;
        ToyOrbitFamily fam;
        fam.p = p;
        fam.q = q;
        fam.u = ramp_preimage(spec.theta0, spec.theta_inf, spec.u_a,
                              spec.u_b, rate);
        fam.radius = std::sqrt(fam.u);
        report.oracle.push_back(fam);
      }
    }
  }
  return report;
}

std::string toy_census_csv(const ToyCensusReport& report) {
  std::ostringstream os;
  os << "period,count\n";
  for (const auto& [period, count] : report.counts) {
    os << period << ',' << count << '\n';
  }
  return os.str();
}

}  // namespace symplab
