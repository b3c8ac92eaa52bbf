#include "bcpg/simulation.hpp"

#include "bcpg/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bcpg {

namespace {

constexpr double kPi = std::numbers::pi;

// Dormand-Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

class Flow {
 public:
  explicit Flow(const NetworkModel& m) : m_(m), arg_(m.size()) {
    for (NodeId i = 1; i <= m.size(); ++i) guarded_.push_back(!m.f(i).is_saturated());
  }

  void set_cell(const SequenceIndex& n) { cell_ = n; }

  // False when a guarded argument leaves its band (minus the guard margin).
  bool eval(const std::vector<double>& theta, std::vector<double>& out, double guard) {
    const int N = m_.size();
    for (NodeId i = 1; i <= N; ++i) {
      double s = m_.phi(i);
      for (const Edge& e : m_.graph().in_edges(i)) s += static_cast<double>(e.weight) * (theta[e.src - 1] - theta[i - 1]);
      arg_[i - 1] = s;
      if (guarded_[i - 1]) {
        const double r = s - 2 * kPi * static_cast<double>(cell_[i - 1]);
        if (!(std::abs(r) < kPi - guard)) return false;
      }
    }
    for (NodeId i = 1; i <= N; ++i) out[i - 1] = m_.omega(i) + m_.f(i).eval(arg_[i - 1]);
    return true;
  }

 private:
  const NetworkModel& m_;
  std::vector<double> arg_;
  std::vector<bool> guarded_;
  SequenceIndex cell_;
};

void record(const NetworkModel& m, Trajectory& tr, double t, const std::vector<double>& theta) {
  tr.times.push_back(t);
  tr.states.push_back(theta);
  auto arg = coupling_arguments(m, theta);
  std::vector<double> u(arg.size());
  for (std::size_t i = 0; i < arg.size(); ++i) u[i] = m.couplings()[i].eval(arg[i]);
  tr.nu_args.push_back(std::move(arg));
  tr.inputs.push_back(std::move(u));
}

std::vector<Kick> expand_kicks(const KickSchedule& kicks, double t_end, int n) {
  std::vector<Kick> all = kicks.impulses;
  for (std::size_t k = 1; k < all.size(); ++k)
    if (!(all[k].time > all[k - 1].time)) throw Error(ErrorCode::InvalidArgument, "kick times must increase");
  if (const auto& p = kicks.persistent) {
    if (!(p->period > 0)) throw Error(ErrorCode::InvalidArgument, "excitation period must be positive");
    for (std::int64_t k = 1;; ++k) {
      const double t = p->start + static_cast<double>(k) * p->period;
      if (t >= t_end || t > p->stop) break;
      all.push_back({t, p->node, p->amplitude});
    }
  }
  for (const Kick& k : all) {
    if (k.node < 1 || k.node > n) throw Error(ErrorCode::InvalidArgument, "kick node out of range");
    if (!std::isfinite(k.shift) || !std::isfinite(k.time)) throw Error(ErrorCode::InvalidArgument, "kick must be finite");
  }
  std::stable_sort(all.begin(), all.end(), [](const Kick& a, const Kick& b) { return a.time < b.time; });
  return all;
}

}  // namespace

std::pair<std::size_t, std::size_t> Trajectory::segment(std::size_t k) const {
  const std::size_t begin = segment_starts.at(k);
  const std::size_t end = k + 1 < segment_starts.size() ? segment_starts[k + 1] : times.size();
  return {begin, end};
}

Trajectory integrate(const NetworkModel& m, const std::vector<double>& theta0, double t_end,
                     const KickSchedule& kicks, const IntegrationOptions& opt) {
  const int N = m.size();
  if (static_cast<int>(theta0.size()) != N) throw Error(ErrorCode::InvalidArgument, "initial state length mismatch");
  if (!(t_end > 0) || !(opt.tol > 0) || !(opt.sample_dt > 0))
    throw Error(ErrorCode::InvalidArgument, "t_end, tol and sample_dt must be positive");
  const std::vector<Kick> schedule = expand_kicks(kicks, t_end, N);

  Trajectory tr;
  std::vector<double> y = theta0;
  Flow flow(m);
  std::vector<double> k1(N), k2(N), k3(N), k4(N), k5(N), k6(N), k7(N), tmp(N), ynew(N);

  double t = 0.0;
  double h = std::min(opt.max_step, opt.sample_dt);
  std::size_t next_kick = 0;
  std::int64_t sample_index = 1;
  const bool saturated = m.any_saturated();

  tr.segment_starts.push_back(0);
  record(m, tr, t, y);  // throws PoleHit on a pole
  flow.set_cell(lifted_cell(m, y));
  bool have_k1 = false;

  auto stage = [&](std::vector<double>& out, std::initializer_list<std::pair<double, const std::vector<double>*>> terms,
                   double hh) {
    for (int i = 0; i < N; ++i) {
      double acc = y[i];
      for (const auto& [c, k] : terms) acc += hh * c * (*k)[i];
      tmp[i] = acc;
    }
    return flow.eval(tmp, out, opt.guard);
  };

  while (t < t_end) {
    const double t_sample = std::min(static_cast<double>(sample_index) * opt.sample_dt, t_end);
    const double t_kick = next_kick < schedule.size() ? schedule[next_kick].time : t_end;
    const double t_stop = std::min(t_sample, t_kick);

    if (t_stop <= t + 1e-13) {
      // Landed on a sample and/or kick time.
      if (t_sample <= t + 1e-13) {
        if (tr.times.back() != t) record(m, tr, t, y);
        ++sample_index;
      }
      while (next_kick < schedule.size() && schedule[next_kick].time <= t + 1e-13) {
        if (tr.times.back() != t) record(m, tr, t, y);
        const Kick& kick = schedule[next_kick++];
        y[kick.node - 1] += kick.shift;
        tr.events.push_back(kick);
        tr.segment_starts.push_back(tr.times.size());
        record(m, tr, t, y);
        flow.set_cell(lifted_cell(m, y));
        have_k1 = false;
      }
      continue;
    }

    if (tr.accepted_steps + tr.rejected_steps >= opt.max_steps) {
      tr.stalled = true;
      break;
    }
    const double step = std::min(h, t_stop - t);
    if (!have_k1) {
      if (!flow.eval(y, k1, 0.0)) throw Error(ErrorCode::PoleApproach, "state left its cell");
      have_k1 = true;
    }
    bool ok = stage(k2, {{a21, &k1}}, step) && stage(k3, {{a31, &k1}, {a32, &k2}}, step) &&
              stage(k4, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, step) &&
              stage(k5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, step) &&
              stage(k6, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, step);
    if (ok) {
      for (int i = 0; i < N; ++i)
        ynew[i] = y[i] + step * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      ok = flow.eval(ynew, k7, opt.guard);
    }
    if (!ok) {
      // Barrier guard: a stage came too close to a pole.
      ++tr.rejected_steps;
      h = 0.5 * step;
      if (h < opt.min_step)
        throw Error(ErrorCode::PoleApproach, "barrier guard forced a step below " + std::to_string(opt.min_step) +
                                                 " at t = " + std::to_string(t));
      continue;
    }
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double e =
          step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e) / opt.tol);
    }
    const bool forced = err > 1.0 && saturated && step <= opt.forced_step;
    if (err <= 1.0 || forced) {
      ++tr.accepted_steps;
      if (forced) ++tr.forced_steps;
      t = (step == t_stop - t) ? t_stop : t + step;
      y.swap(ynew);
      k1.swap(k7);
      if (saturated) {
        // Saturated nodes may change cell; keep the guard band current.
        flow.set_cell(lifted_cell(m, y));
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // A clipped step says nothing about the controller's preferred size.
      if (step == h || factor < 1.0) h = std::min(opt.max_step, step * factor);
      if (forced) h = std::max(h, opt.forced_step);
    } else {
      ++tr.rejected_steps;
      h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < opt.min_step && !saturated)
        throw Error(ErrorCode::PoleApproach, "step size underflow at t = " + std::to_string(t));
      if (saturated) h = std::max(h, 0.5 * opt.forced_step);
    }
  }
  if (tr.times.back() != t) record(m, tr, t, y);
  return tr;
}

DetectedPattern detect_pattern(const Trajectory& tr, const NetworkModel& m, double window, double tol) {
  DetectedPattern out;
  const int N = m.size();
  const auto [begin, end] = tr.segment(tr.segment_starts.size() - 1);
  if (end - begin < 3) return out;
  const double t_last = tr.times[end - 1];
  const double span = t_last - tr.times[begin];
  if (window <= 0) window = std::max(10.0, 0.1 * span);
  out.window = window;
  if (span < 2 * window) return out;

  std::size_t w0 = end - 1;
  while (w0 > begin && tr.times[w0] > t_last - window) --w0;
  const double w = t_last - tr.times[w0];
  const auto& y_end = tr.states[end - 1];
  const auto& y_start = tr.states[w0];

  double mean = 0.0;
  for (int i = 0; i < N; ++i) mean += (y_end[i] - y_start[i]) / w;
  out.omega_bar_est = mean / N;
  for (int i = 0; i < N; ++i) {
    double d = std::fmod(y_end[i] - y_end[0], 2 * kPi);
    if (d < 0) d += 2 * kPi;
    if (d >= 2 * kPi) d -= 2 * kPi;
    out.delta_est.push_back(d);
  }

  double spread = 0.0, drift = 0.0;
  double margin = kPi;
  for (std::size_t s = w0; s < end; ++s) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < N; ++i) {
      const double rate = m.omega()[i] + tr.inputs[s][i];
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
    }
    spread = std::max(spread, hi - lo);
    for (int i = 0; i < N; ++i) {
      const double a = tr.nu_args[s][i];
      margin = std::min(margin, kPi - std::abs(a - 2 * kPi * std::floor((a + kPi) / (2 * kPi))));
    }
  }
  for (const Edge& e : m.graph().edges()) {
    const double now = y_end[e.src - 1] - y_end[e.dst - 1];
    const double then = y_start[e.src - 1] - y_start[e.dst - 1];
    drift = std::max(drift, std::abs(now - then));
  }
  out.residual = std::max(spread, drift);
  out.converged = spread < tol && drift < tol;
  out.min_margin = margin;
  out.near_boundary = margin < 1e-3;
  try {
    out.cls = classify_state(m, y_end);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OnBoundary) throw;
    out.converged = false;
    out.near_boundary = true;
  }
  return out;
}

InvarianceReport verify_invariance(const NetworkModel& m, const Trajectory& tr) {
  InvarianceReport rep;
  rep.min_margin = kPi;
  const int N = m.size();
  for (std::size_t k = 0; k < tr.segment_starts.size(); ++k) {
    const auto [begin, end] = tr.segment(k);
    if (begin >= end) continue;
    const SequenceIndex cell = lifted_cell(m, tr.states[begin]);
    rep.segment_cells.push_back(cell);
    double conserved0 = 0.0;
    for (NodeId i : m.zeta().iscc_nodes)
      conserved0 += static_cast<double>(m.zeta().at(i)) * (tr.nu_args[begin][i - 1] - m.phi(i));
    for (std::size_t s = begin; s < end; ++s) {
      double conserved = 0.0;
      for (NodeId i : m.zeta().iscc_nodes)
        conserved += static_cast<double>(m.zeta().at(i)) * (tr.nu_args[s][i - 1] - m.phi(i));
      rep.conserved_drift = std::max(rep.conserved_drift, std::abs(conserved - conserved0));
      for (int i = 0; i < N; ++i) {
        if (m.couplings()[i].is_saturated()) continue;
        const double r = tr.nu_args[s][i] - 2 * kPi * static_cast<double>(cell[i]);
        const double margin = kPi - std::abs(r);
        if (!(margin > 0))
          throw Error(ErrorCode::InvarianceViolated, "node " + std::to_string(i + 1) + " left its cell at t = " +
                                                         std::to_string(tr.times[s]));
        rep.min_margin = std::min(rep.min_margin, margin);
      }
    }
  }
  return rep;
}

double verify_bounded_input(const Trajectory& tr) {
  double bound = 0.0;
  for (const auto& u : tr.inputs)
    for (double v : u) bound = std::max(bound, std::abs(v));
  return bound;
}

LinearizationReport linearization_check(const NetworkModel& m, const std::vector<double>& theta) {
  const int N = m.size();
  const auto arg = coupling_arguments(m, theta);
  Eigen::MatrixXd J(N, N);
  for (int i = 0; i < N; ++i) {
    const double slope = m.couplings()[i].derivative(arg[i]);
    for (int j = 0; j < N; ++j) J(i, j) = -slope * static_cast<double>(m.laplacian()(i + 1, j + 1));
  }
  LinearizationReport rep;
  for (int i = 0; i < N; ++i) {
    rep.row_sum_residual = std::max(rep.row_sum_residual, std::abs(J.row(i).sum()));
    for (int j = 0; j < N; ++j)
      if (i != j && J(i, j) < 0) rep.metzler = false;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(J, false);
  const auto values = solver.eigenvalues();
  for (int k = 0; k < N; ++k) rep.eigenvalues.push_back(values[k]);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const auto& a, const auto& b) { return a.real() > b.real(); });
  std::size_t trivial = 0;
  for (std::size_t k = 1; k < rep.eigenvalues.size(); ++k)
    if (std::abs(rep.eigenvalues[k]) < std::abs(rep.eigenvalues[trivial])) trivial = k;
  rep.max_nontrivial_real = -1e300;
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
    if (k != trivial) rep.max_nontrivial_real = std::max(rep.max_nontrivial_real, rep.eigenvalues[k].real());
  if (N == 1) rep.max_nontrivial_real = 0.0;
  return rep;
}

}  // namespace bcpg
