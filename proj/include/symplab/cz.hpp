// Conley-Zehnder index of symplectic paths: winding method with endpoint
// normalization, independent crossing-form oracle, lower-semicontinuous
// extension, Maslov loop index, mean index, degree-support intervals.
#pragma once

#include "symplab/path.hpp"

namespace symplab {

// Frozen sign convention: the planar rotation path t -> e^{-i alpha t} with
// alpha in (0, 2pi) has index +1. Pinned by the crossing oracle in the test
// suite and used as a regression constant.
constexpr long long kRotationPathIndexAlphaIn0To2Pi = 1;

enum class IndexMethod { winding, crossing_oracle, closed_form_diagonal };

struct IndexReport {
  long long cz = 0;
  double mean = 0.0;
  bool degenerate_endpoint = false;
  double endpoint_margin = 0.0;
  IndexMethod method = IndexMethod::winding;
};

struct DegreeInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool intersects(const DegreeInterval& other) const {
    return !(hi < other.lo || other.hi < lo);
  }
};

// Index of a nondegenerate path. Degenerate endpoints (margin < 1e-8) are
// routed to the lsc extension and flagged. The winding method computes
//   cz = 2 * round((w_M - w_e)/(2 pi)) + cz(e),
// where e(tau) = exp(tau log M(1)) is the explicit normalization path to the
// endpoint and cz(e) is the closed form for autonomous linear flows
// (2*floor(rate/2pi)+1 per Krein-signed elliptic pair, 0 for hyperbolic and
// loxodromic pairs). Diagonal paths use the exact closed form.
IndexReport cz_index(const SymplecticPath& path);

// Independent oracle: counts parameter values with det(M(t)-I) = 0 on a
// slightly perturbed path, each signed by the signature of the crossing form
// <v, A(t) v> on ker(M(t)-I), plus the endpoint offset sig(A(0))/2 at t=0.
long long cz_crossing_oracle(const SymplecticPath& path);

// Lower-semicontinuous extension: minimum of cz_index over the finite
// perturbation family M(t) R(eps * eta(t)), eps in {-1e-4, +1e-4};
// closed form for diagonal paths (a degenerate angle 2 pi m contributes
// 2m - 1). Nondegenerate paths return cz_index unchanged.
IndexReport cz_index_lsc(const SymplecticPath& path);

// Maslov index of a loop (endpoint within 1e-8 of I): winding of the polar
// determinant argument divided by 2 pi.
long long maslov_loop(const SymplecticPath& loop);

// Mean index: exact value 2*round((w_M - w_e)/(2 pi)) + sum of Krein-signed
// elliptic rates / pi; diagonal closed form sum(alpha_r)/pi.
double mean_cz(const SymplecticPath& path);

// [mean - shift - n, mean - shift + n].
DegreeInterval degree_support_interval(double mean, int n, long long shift);

}  // namespace symplab
