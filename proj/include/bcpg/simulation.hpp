#pragma once

// Integration of the coupled phase dynamics in lifted coordinates, with
// impulsive kicks, pattern detection and numerical invariance checks.

#include "bcpg/model.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcpg {

struct Kick {
  double time = 0.0;
  NodeId node = 1;
  double shift = 0.0;
};

/// Impulses of `amplitude` on `node` at start + period, start + 2 period, ...
struct PersistentExcitation {
  NodeId node = 1;
  double amplitude = 0.0;
  double period = 1.0;
  double start = 0.0;
  /// No impulses after this time (the run then settles kick-free).
  double stop = 1e300;
};

struct KickSchedule {
  std::vector<Kick> impulses;
  std::optional<PersistentExcitation> persistent;
};

struct IntegrationOptions {
  double tol = 1e-9;
  double sample_dt = 0.05;
  double max_step = 0.25;
  /// Non-saturated arguments must stay this far from a pole at every stage.
  double guard = 1e-7;
  double min_step = 1e-14;
  /// Below this step, saturated models accept the step anyway (discontinuous
  /// right-hand side at a cell boundary); counted in forced_steps.
  double forced_step = 1e-11;
  std::uint64_t max_steps = 20'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;   // lifted theta
  std::vector<std::vector<double>> nu_args;  // nu_i + phi_i
  std::vector<std::vector<double>> inputs;   // f_i(nu_i + phi_i)
  std::vector<Kick> events;
  /// Sample index where each kick-free segment begins.
  std::vector<std::size_t> segment_starts;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;
  std::uint64_t forced_steps = 0;
  /// Run stopped early at max_steps.
  bool stalled = false;

  std::size_t size() const { return times.size(); }
  /// Samples [begin, end) of segment k.
  std::pair<std::size_t, std::size_t> segment(std::size_t k) const;
};

/// Throws PoleHit if theta0 starts on a pole and PoleApproach when the
/// barrier guard drives the step below min_step.
Trajectory integrate(const NetworkModel& m, const std::vector<double>& theta0, double t_end,
                     const KickSchedule& kicks = {}, const IntegrationOptions& options = {});

struct DetectedPattern {
  double omega_bar_est = 0.0;
  /// theta_i - theta_1 reduced to [0, 2 pi).
  std::vector<double> delta_est;
  std::optional<SequenceIndex> cls;
  bool converged = false;
  double residual = 0.0;
  /// Some argument came within 1e-3 of a cell edge in the window.
  bool near_boundary = false;
  double min_margin = 0.0;
  double window = 0.0;
};

/// Uses the last kick-free segment. window <= 0 selects
/// max(10, 10% of the segment).
DetectedPattern detect_pattern(const Trajectory& tr, const NetworkModel& m, double window = 0.0,
                               double tol = 1e-6);

struct InvarianceReport {
  double min_margin = 0.0;
  /// Largest deviation of sum_{i in S} zeta_i nu_i from its segment start.
  double conserved_drift = 0.0;
  std::vector<SequenceIndex> segment_cells;
};

/// Every sample stays inside the cell its segment started in (saturated
/// nodes excepted). Throws InvarianceViolated at the first bad sample.
InvarianceReport verify_invariance(const NetworkModel& m, const Trajectory& tr);

/// max over the run of |f_i(nu_i + phi_i)|.
double verify_bounded_input(const Trajectory& tr);

struct LinearizationReport {
  double row_sum_residual = 0.0;  // max |J 1|
  std::vector<std::complex<double>> eigenvalues;
  /// Largest real part after removing the eigenvalue closest to zero.
  double max_nontrivial_real = 0.0;
  bool metzler = true;
};

/// J = -diag(f_i'(nu_i + phi_i)) L at theta.
LinearizationReport linearization_check(const NetworkModel& m, const std::vector<double>& theta);

}  // namespace bcpg
