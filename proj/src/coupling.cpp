#include "bcpg/coupling.hpp"

#include "bcpg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bcpg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tan_half_derivative(double r) { return 0.5 / (std::cos(0.5 * r) * std::cos(0.5 * r)); }

// Cubic Hermite on [s0, s1].
double hermite(double s0, double s1, double y0, double y1, double m0, double m1, double s) {
  const double h = s1 - s0;
  const double t = (s - s0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_derivative(double s0, double s1, double y0, double y1, double m0, double m1, double s) {
  const double h = s1 - s0;
  const double t = (s - s0) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (6 * t - 6 * t2) * y1) / h + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1;
}

}  // namespace

double reduce_angle(double s) {
  double r = s - 2 * kPi * std::floor((s + kPi) / (2 * kPi));
  if (r >= kPi) r -= 2 * kPi;
  if (r < -kPi) r += 2 * kPi;
  return r;
}

BarrierFunction BarrierFunction::tan_half(double gain, double offset) {
  if (!(gain > 0) || !std::isfinite(offset)) throw Error(ErrorCode::InvalidArgument, "tan_half needs gain > 0");
  return BarrierFunction(TanHalf{gain, offset});
}

BarrierFunction BarrierFunction::scaled(double g, const BarrierFunction& prototype) {
  if (!(g > 0) || !std::isfinite(g)) throw Error(ErrorCode::InvalidArgument, "scaled prototype needs g > 0");
  return BarrierFunction(ScaledPrototype{g, std::make_shared<const BarrierFunction>(prototype)});
}

BarrierFunction BarrierFunction::shifted_scaled_tan_half(double gain, double shift, double denom, double offset) {
  if (!(gain / denom > 0) || !std::isfinite(gain / denom) || !std::isfinite(shift) || !std::isfinite(offset))
    throw Error(ErrorCode::InvalidArgument, "shifted_scaled_tan_half needs gain/denom > 0");
  return BarrierFunction(ShiftedScaledTanHalf{gain, shift, denom, offset});
}

BarrierFunction BarrierFunction::monotone_piecewise(const std::vector<std::pair<double, double>>& knots) {
  if (knots.size() < 2) throw Error(ErrorCode::InvalidArgument, "monotone_piecewise needs two or more knots");
  MonotonePiecewise p;
  for (const auto& [s, y] : knots) {
    if (!(s > -kPi && s < kPi) || !std::isfinite(y))
      throw Error(ErrorCode::InvalidArgument, "knot abscissae must lie in (-pi, pi)");
    if (!p.s.empty() && (s <= p.s.back() || y <= p.y.back()))
      throw Error(ErrorCode::InvalidArgument, "knots must be strictly increasing in s and y");
    p.s.push_back(s);
    p.y.push_back(y);
  }
  const std::size_t n = p.s.size();
  std::vector<double> secant(n - 1), width(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    width[k] = p.s[k + 1] - p.s[k];
    secant[k] = (p.y[k + 1] - p.y[k]) / width[k];
  }
  // Fritsch-Butland weighted harmonic mean inside, one-sided secants at the
  // ends; all slopes stay positive and within the Fritsch-Carlson region.
  p.slope.resize(n);
  p.slope.front() = secant.front();
  p.slope.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h0 = width[k - 1], h1 = width[k];
    const double d0 = secant[k - 1], d1 = secant[k];
    p.slope[k] = 3 * (h0 + h1) / ((2 * h1 + h0) / d0 + (h1 + 2 * h0) / d1);
  }
  const double c0 = std::cos(0.5 * p.s.front());
  const double c1 = std::cos(0.5 * p.s.back());
  p.left_gain = 2 * p.slope.front() * c0 * c0;
  p.right_gain = 2 * p.slope.back() * c1 * c1;
  return BarrierFunction(std::move(p));
}

bool operator==(const BarrierFunction& a, const BarrierFunction& b) {
  if (a.v_.index() != b.v_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const TanHalf& x) {
            const auto& y = std::get<TanHalf>(b.v_);
            return x.gain == y.gain && x.offset == y.offset;
          },
          [&](const ScaledPrototype& x) {
            const auto& y = std::get<ScaledPrototype>(b.v_);
            return x.g == y.g && *x.prototype == *y.prototype;
          },
          [&](const ShiftedScaledTanHalf& x) {
            const auto& y = std::get<ShiftedScaledTanHalf>(b.v_);
            return x.gain == y.gain && x.shift == y.shift && x.denom == y.denom && x.offset == y.offset;
          },
          [&](const Saturated& x) {
            const auto& y = std::get<Saturated>(b.v_);
            return x.m_minus == y.m_minus && x.m_plus == y.m_plus && x.delta == y.delta && *x.inner == *y.inner;
          },
          [&](const MonotonePiecewise& x) {
            const auto& y = std::get<MonotonePiecewise>(b.v_);
            return x.s == y.s && x.y == y.y;
          },
      },
      a.v_);
}

BarrierFunction saturate(const BarrierFunction& f, double m_minus, double m_plus, double delta) {
  if (!(m_minus < m_plus) || !(delta > 0) || !(m_minus + delta < m_plus - delta))
    throw Error(ErrorCode::BadBounds, "need m_minus < m_plus and a nonempty core interval");
  const auto [lo, hi] = f.range();
  if (!(m_minus + delta > lo) || !(m_plus - delta < hi))
    throw Error(ErrorCode::BadBounds, "core interval exceeds the range of the inner function");
  Saturated sat;
  sat.inner = std::make_shared<const BarrierFunction>(f);
  sat.m_minus = m_minus;
  sat.m_plus = m_plus;
  sat.delta = delta;
  sat.s_minus = f.inverse(m_minus + delta);
  sat.s_plus = f.inverse(m_plus - delta);
  if (!(sat.s_minus < sat.s_plus)) throw Error(ErrorCode::BadBounds, "saturation core is empty");
  return BarrierFunction(std::move(sat));
}

double BarrierFunction::eval_reduced(double r) const {
  return std::visit(
      Overloaded{
          [&](const TanHalf& t) { return t.gain * std::tan(0.5 * r) + t.offset; },
          [&](const ScaledPrototype& p) { return p.g * p.prototype->eval_reduced(r); },
          [&](const ShiftedScaledTanHalf& t) { return t.gain * (std::tan(0.5 * r) + t.shift) / t.denom + t.offset; },
          [&](const Saturated& s) {
            if (r <= -kPi) return s.m_minus;
            if (r < s.s_minus) return s.m_minus + s.delta * (r + kPi) / (s.s_minus + kPi);
            if (r > s.s_plus) return s.m_plus - s.delta * (kPi - r) / (kPi - s.s_plus);
            return s.inner->eval_reduced(r);
          },
          [&](const MonotonePiecewise& p) {
            if (r <= p.s.front()) return p.y.front() + p.left_gain * (std::tan(0.5 * r) - std::tan(0.5 * p.s.front()));
            if (r >= p.s.back()) return p.y.back() + p.right_gain * (std::tan(0.5 * r) - std::tan(0.5 * p.s.back()));
            const auto it = std::upper_bound(p.s.begin(), p.s.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - p.s.begin()) - 1;
            return hermite(p.s[k], p.s[k + 1], p.y[k], p.y[k + 1], p.slope[k], p.slope[k + 1], r);
          },
      },
      v_);
}

double BarrierFunction::derivative_reduced(double r) const {
  return std::visit(
      Overloaded{
          [&](const TanHalf& t) { return t.gain * tan_half_derivative(r); },
          [&](const ScaledPrototype& p) { return p.g * p.prototype->derivative_reduced(r); },
          [&](const ShiftedScaledTanHalf& t) { return t.gain / t.denom * tan_half_derivative(r); },
          [&](const Saturated& s) {
            if (r < s.s_minus) return s.delta / (s.s_minus + kPi);
            if (r > s.s_plus) return s.delta / (kPi - s.s_plus);
            return s.inner->derivative_reduced(r);
          },
          [&](const MonotonePiecewise& p) {
            if (r <= p.s.front()) return p.left_gain * tan_half_derivative(r);
            if (r >= p.s.back()) return p.right_gain * tan_half_derivative(r);
            const auto it = std::upper_bound(p.s.begin(), p.s.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - p.s.begin()) - 1;
            return hermite_derivative(p.s[k], p.s[k + 1], p.y[k], p.y[k + 1], p.slope[k], p.slope[k + 1], r);
          },
      },
      v_);
}

double BarrierFunction::eval(double s) const {
  const double r = reduce_angle(s);
  if (!is_saturated() && (r < -kPi + kPoleGuard || r > kPi - kPoleGuard))
    throw Error(ErrorCode::PoleHit, "coupling argument at a barrier pole");
  return eval_reduced(r);
}

double BarrierFunction::derivative(double s) const {
  const double r = reduce_angle(s);
  if (!is_saturated() && (r < -kPi + kPoleGuard || r > kPi - kPoleGuard))
    throw Error(ErrorCode::PoleHit, "coupling argument at a barrier pole");
  return derivative_reduced(r);
}

double BarrierFunction::inverse(double y) const {
  if (!std::isfinite(y)) throw Error(ErrorCode::OutOfRange, "non-finite value");
  return std::visit(
      Overloaded{
          [&](const TanHalf& t) { return 2 * std::atan((y - t.offset) / t.gain); },
          [&](const ScaledPrototype& p) { return p.prototype->inverse(y / p.g); },
          [&](const ShiftedScaledTanHalf& t) { return 2 * std::atan((y - t.offset) * t.denom / t.gain - t.shift); },
          [&](const Saturated& s) {
            if (!(y > s.m_minus && y < s.m_plus))
              throw Error(ErrorCode::OutOfRange, "value " + std::to_string(y) + " outside saturated range");
            if (y < s.m_minus + s.delta) return -kPi + (y - s.m_minus) * (s.s_minus + kPi) / s.delta;
            if (y > s.m_plus - s.delta) return kPi - (s.m_plus - y) * (kPi - s.s_plus) / s.delta;
            return s.inner->inverse(y);
          },
          [&](const MonotonePiecewise& p) {
            if (y <= p.y.front())
              return 2 * std::atan(std::tan(0.5 * p.s.front()) + (y - p.y.front()) / p.left_gain);
            if (y >= p.y.back())
              return 2 * std::atan(std::tan(0.5 * p.s.back()) + (y - p.y.back()) / p.right_gain);
            const auto it = std::upper_bound(p.y.begin(), p.y.end(), y);
            const std::size_t k = static_cast<std::size_t>(it - p.y.begin()) - 1;
            double lo = p.s[k], hi = p.s[k + 1];
            // Bisection down to adjacent doubles.
            for (int iter = 0; iter < 200; ++iter) {
              const double mid = 0.5 * (lo + hi);
              if (mid <= lo || mid >= hi) break;
              const double v = hermite(p.s[k], p.s[k + 1], p.y[k], p.y[k + 1], p.slope[k], p.slope[k + 1], mid);
              if (v < y)
                lo = mid;
              else
                hi = mid;
            }
            const double vlo = hermite(p.s[k], p.s[k + 1], p.y[k], p.y[k + 1], p.slope[k], p.slope[k + 1], lo);
            const double vhi = hermite(p.s[k], p.s[k + 1], p.y[k], p.y[k + 1], p.slope[k], p.slope[k + 1], hi);
            return std::abs(vlo - y) <= std::abs(vhi - y) ? lo : hi;
          },
      },
      v_);
}

double BarrierFunction::inverse_clamped(double y) const {
  const auto [lo, hi] = range();
  if (y <= lo) return -kPi;
  if (y >= hi) return kPi;
  return inverse(y);
}

std::pair<double, double> BarrierFunction::range() const {
  return std::visit(Overloaded{
                        [](const ScaledPrototype& p) {
                          auto [lo, hi] = p.prototype->range();
                          return std::pair{p.g * lo, p.g * hi};
                        },
                        [](const Saturated& s) { return std::pair{s.m_minus, s.m_plus}; },
                        [](const auto&) { return std::pair{-kInf, kInf}; },
                    },
                    v_);
}

bool BarrierFunction::is_saturated() const {
  return std::visit(Overloaded{
                        [](const ScaledPrototype& p) { return p.prototype->is_saturated(); },
                        [](const Saturated&) { return true; },
                        [](const auto&) { return false; },
                    },
                    v_);
}

}  // namespace bcpg
