#pragma once

// Barrier coupling functions on (-pi, pi), extended 2pi-periodically.

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace bcpg {

/// Arguments within this distance of +-pi (after reduction) are poles.
inline constexpr double kPoleGuard = 1e-9;

/// Representative of s in [-pi, pi).
double reduce_angle(double s);

class BarrierFunction;
using BarrierPtr = std::shared_ptr<const BarrierFunction>;

/// f(s) = gain * tan(s/2) + offset.
struct TanHalf {
  double gain = 1.0;
  double offset = 0.0;
};

/// f(s) = g * prototype(s).
struct ScaledPrototype {
  double g = 1.0;
  BarrierPtr prototype;
};

/// f(s) = gain * (tan(s/2) + shift) / denom + offset.
struct ShiftedScaledTanHalf {
  double gain = 1.0;
  double shift = 0.0;
  double denom = 1.0;
  double offset = 0.0;
};

/// Monotone cut of `inner` with range (m_minus, m_plus). Agrees with inner on
/// [s_minus, s_plus] where inner(s_minus) = m_minus + delta and
/// inner(s_plus) = m_plus - delta; linear-in-angle tails outside.
struct Saturated {
  BarrierPtr inner;
  double m_minus = 0.0;
  double m_plus = 0.0;
  double delta = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
};

/// Shape-preserving cubic Hermite through strictly increasing knots with
/// tan-half tails matched in value and slope at the outer knots.
struct MonotonePiecewise {
  std::vector<double> s;
  std::vector<double> y;
  std::vector<double> slope;
  double left_gain = 1.0;
  double right_gain = 1.0;
};

class BarrierFunction {
 public:
  using Variant = std::variant<TanHalf, ScaledPrototype, ShiftedScaledTanHalf, Saturated, MonotonePiecewise>;

  BarrierFunction() : v_(TanHalf{}) {}

  static BarrierFunction tan_half(double gain, double offset = 0.0);
  static BarrierFunction scaled(double g, const BarrierFunction& prototype);
  static BarrierFunction shifted_scaled_tan_half(double gain, double shift, double denom, double offset);
  /// Knots (s_k, y_k), at least two, strictly increasing in both coordinates,
  /// with s_k in (-pi, pi).
  static BarrierFunction monotone_piecewise(const std::vector<std::pair<double, double>>& knots);

  /// Throws PoleHit for non-saturated functions when the reduced argument is
  /// within kPoleGuard of +-pi.
  double eval(double s) const;
  double derivative(double s) const;
  /// Unique s in (-pi, pi) with eval(s) = y. Throws OutOfRange when y lies
  /// outside the range of a saturated function.
  double inverse(double y) const;
  /// As inverse, but maps y at or beyond a finite range end to -pi / +pi.
  double inverse_clamped(double y) const;

  /// Open range (lo, hi); infinite for barrier functions.
  std::pair<double, double> range() const;
  bool is_saturated() const;

  const Variant& variant() const { return v_; }

  /// Structural equality: same variant and parameters, nested functions compared recursively.
  friend bool operator==(const BarrierFunction& a, const BarrierFunction& b);

  friend BarrierFunction saturate(const BarrierFunction& f, double m_minus, double m_plus, double delta);

 private:
  explicit BarrierFunction(Variant v) : v_(std::move(v)) {}

  double eval_reduced(double r) const;
  double derivative_reduced(double r) const;

  Variant v_;
};

/// Throws BadBounds unless m_minus < m_plus, delta > 0 and the core interval
/// [m_minus + delta, m_plus - delta] is nonempty and inside the range of f.
BarrierFunction saturate(const BarrierFunction& f, double m_minus, double m_plus, double delta);

}  // namespace bcpg
