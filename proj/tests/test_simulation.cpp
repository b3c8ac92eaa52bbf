#include "bcpg/error.hpp"
#include "bcpg/scenarios.hpp"
#include "bcpg/simulation.hpp"
#include "catch_amalgamated.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace bcpg;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Classical RK4 with a fixed small step, as an independent reference.
std::vector<double> rk4(const NetworkModel& m, std::vector<double> x, double t_end, int steps) {
  const std::size_t n = x.size();
  const double h = t_end / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), y(n);
  for (int s = 0; s < steps; ++s) {
    vector_field(m, x, k1);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    vector_field(m, y, k2);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    vector_field(m, y, k3);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
    vector_field(m, y, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("integrator matches a fixed-step reference") {
  const NetworkModel m = scenarios::three_ring_model();
  const std::vector<double> x0{0.3, -0.4, 1.0};
  IntegrationOptions opt;
  opt.tol = 1e-11;
  const Trajectory tr = integrate(m, x0, 5.0, {}, opt);
  const auto ref = rk4(m, x0, 5.0, 200000);
  REQUIRE(tr.times.back() == Approx(5.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(tr.states.back()[i] == Approx(ref[i]).margin(1e-8));
}

TEST_CASE("samples are evenly spaced and include the end point") {
  const NetworkModel m = scenarios::two_agent_model();
  const Trajectory tr = integrate(m, {0.0, 0.0}, 1.0);
  REQUIRE(tr.size() == 21);
  for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr.times[k] == Approx(0.05 * k).margin(1e-12));
  CHECK(tr.nu_args.size() == tr.size());
  CHECK(tr.inputs.size() == tr.size());
}

TEST_CASE("kicks are exact jumps") {
  // A lone node drifts at omega + f(phi).
  const NetworkModel m(Digraph(1, {}), {0.5}, {0.3}, {BarrierFunction::tan_half(1.0)});
  const double rate = 0.5 + std::tan(0.15);
  KickSchedule kicks;
  kicks.impulses.push_back({1.0, 1, 0.7});
  kicks.impulses.push_back({2.5, 1, -0.2});
  const Trajectory tr = integrate(m, {0.1}, 4.0, kicks);
  CHECK(tr.states.back()[0] == Approx(0.1 + 4 * rate + 0.5).epsilon(1e-12));
  CHECK(tr.events.size() == 2);
  CHECK(tr.segment_starts.size() == 3);
  // Before and after samples at the kick time.
  bool found = false;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    if (tr.times[k] == 1.0 && tr.times[k + 1] == 1.0) {
      CHECK(tr.states[k + 1][0] - tr.states[k][0] == Approx(0.7));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("persistent excitation fires on its grid until it stops") {
  const NetworkModel m = scenarios::two_agent_model();
  KickSchedule kicks;
  kicks.persistent = PersistentExcitation{2, 0.25, 20.0, 0.0, 100.0};
  const Trajectory tr = integrate(m, {0.0, 0.0}, 150.0, kicks);
  REQUIRE(tr.events.size() == 5);
  for (std::size_t k = 0; k < tr.events.size(); ++k) {
    CHECK(tr.events[k].time == Approx(20.0 * (k + 1)));
    CHECK(tr.events[k].node == 2);
  }
}

TEST_CASE("starting on a pole is rejected") {
  const NetworkModel m = scenarios::two_agent_model();
  // theta2 - theta1 + pi/2 = pi at node 1.
  CHECK(code_of([&] { integrate(m, {0.0, kPi / 2}, 1.0); }) == ErrorCode::PoleHit);
}

TEST_CASE("pattern detection on the two-agent model") {
  const NetworkModel m = scenarios::two_agent_model();
  const Trajectory near = integrate(m, {0.0, 0.0}, 60.0);
  const DetectedPattern a = detect_pattern(near, m);
  CHECK(a.converged);
  CHECK(a.omega_bar_est == Approx(2.0).margin(1e-6));
  CHECK(a.delta_est[1] == Approx(kPi / 2 - 0.1).margin(1e-6));
  CHECK(a.min_margin == Approx(0.1).margin(1e-6));
  const Trajectory robust = integrate(m, {3 * kPi / 4, 0.0}, 60.0);
  const DetectedPattern b = detect_pattern(robust, m);
  CHECK(b.omega_bar_est == Approx(1.0).margin(1e-6));
  CHECK(b.delta_est[1] == Approx(kPi).margin(1e-6));
}

TEST_CASE("short runs do not claim convergence") {
  const NetworkModel m = scenarios::star_model();
  const Trajectory tr = integrate(m, scenarios::star_initial_conditions()[0].theta0, 25.0);
  CHECK_FALSE(detect_pattern(tr, m).converged);
}

TEST_CASE("cells are invariant and the weighted sum is conserved") {
  for (const auto& ic : scenarios::nine_node_initial_conditions()) {
    const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::Gains);
    const Trajectory tr = integrate(m, ic.theta0, 40.0);
    const InvarianceReport r = verify_invariance(m, tr);
    CHECK(r.min_margin > 0);
    CHECK(r.conserved_drift < 1e-8);
    REQUIRE(r.segment_cells.size() == 1);
    CHECK(r.segment_cells[0] == lifted_cell(m, ic.theta0));
  }
}

TEST_CASE("bounded input") {
  const NetworkModel m = scenarios::star_model();
  const Trajectory tr = integrate(m, scenarios::star_initial_conditions()[1].theta0, 30.0);
  double worst = 0;
  for (const auto& u : tr.inputs)
    for (double v : u) worst = std::max(worst, std::abs(v));
  CHECK(verify_bounded_input(tr) == worst);
  CHECK(std::isfinite(worst));
}

TEST_CASE("saturated inputs stay inside their range") {
  const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::Saturated);
  const Trajectory tr = integrate(m, scenarios::nine_node_initial_conditions()[0].theta0, 20.0);
  double bound = 0;
  for (const auto& f : m.couplings()) bound = std::max({bound, std::abs(f.range().first), std::abs(f.range().second)});
  CHECK(verify_bounded_input(tr) <= bound);
}

TEST_CASE("linearization matches a direct Jacobian") {
  const NetworkModel m = scenarios::three_ring_model();
  const std::vector<double> theta{0.1, 2.0, 4.3};
  const LinearizationReport r = linearization_check(m, theta);
  CHECK(r.row_sum_residual < 1e-12);
  CHECK(r.metzler);
  // Central differences of the vector field.
  const int n = 3;
  Eigen::MatrixXd j(n, n);
  std::vector<double> plus(n), minus(n);
  for (int c = 0; c < n; ++c) {
    auto tp = theta, tm = theta;
    tp[c] += 1e-6;
    tm[c] -= 1e-6;
    vector_field(m, tp, plus);
    vector_field(m, tm, minus);
    for (int r2 = 0; r2 < n; ++r2) j(r2, c) = (plus[r2] - minus[r2]) / 2e-6;
  }
  const Eigen::VectorXcd ev = j.eigenvalues();
  double max_real = -INFINITY;
  for (int k = 0; k < n; ++k)
    if (std::abs(ev[k]) > 1e-6) max_real = std::max(max_real, ev[k].real());
  CHECK(r.max_nontrivial_real == Approx(max_real).epsilon(1e-5));
  CHECK(r.max_nontrivial_real < 0);
}
