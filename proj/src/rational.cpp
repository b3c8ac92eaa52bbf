#include "bcpg/rational.hpp"

#include "bcpg/error.hpp"

#include <cmath>
#include <numbers>

namespace bcpg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::OnBoundary: return "OnBoundary";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::SaturationEscape: return "SaturationEscape";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::SignMismatch: return "SignMismatch";
    case ErrorCode::BoundExhausted: return "BoundExhausted";
    case ErrorCode::InfeasibleOrdering: return "InfeasibleOrdering";
    case ErrorCode::CannotSeparate: return "CannotSeparate";
    case ErrorCode::PoleApproach: return "PoleApproach";
    case ErrorCode::InvarianceViolated: return "InvarianceViolated";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

Rational exact(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  return Rational(x);
}

Rational rationalize(double x, double tol) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  // Convergents h_k / k_k of the continued fraction of the exact double.
  const Rational target = exact(x);
  const Rational tolerance = exact(tol);
  BigInt h_prev = 1, h_prev2 = 0;
  BigInt k_prev = 0, k_prev2 = 1;
  Rational rest = target;
  for (int iter = 0; iter < 200; ++iter) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    BigInt h = a * h_prev + h_prev2;
    BigInt k = a * k_prev + k_prev2;
    Rational approx(h, k);
    approx.canonicalize();
    Rational err = approx - target;
    if (abs(err) <= tolerance) return approx;
    Rational frac = rest - Rational(a);
    if (frac == 0) return approx;
    rest = 1 / frac;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
  }
  return target;
}

Rational angle_over_pi(double radians) { return rationalize(radians / std::numbers::pi, 1e-12); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) throw Error(ErrorCode::OutOfRange, "integer overflow");
  return static_cast<std::int64_t>(z.get_si());
}

std::int64_t to_int64(const Rational& q) {
  if (!is_integer(q)) throw Error(ErrorCode::InvalidArgument, "value is not an integer");
  return to_int64(BigInt(q.get_num()));
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace bcpg
