#include "bcpg/design.hpp"
#include "bcpg/error.hpp"
#include "bcpg/scenarios.hpp"
#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace bcpg;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool contains(const Digraph& g, const Edge& e) { return g.has_edge(e.src, e.dst); }

}  // namespace

TEST_CASE("phase biases realize the nine-node target") {
  const auto target = scenarios::nine_node_target();
  const auto g = scenarios::nine_node_graph(1);
  const DesignSolution s = assign_by_phase_bias(g, scenarios::nine_node_omega(),
                                                std::vector<BarrierFunction>(9, BarrierFunction::tan_half(1.0)), target);
  CHECK(s.max_residual < 1e-12);
  CHECK(max_abs(pattern_residuals(s.model, target)) < 1e-12);
  for (double phi : s.model.phi()) {
    CHECK(phi >= -kPi);
    CHECK(phi < kPi);
  }
}

TEST_CASE("gains for the nine-node target") {
  const auto m = scenarios::nine_node_model(scenarios::NineNodeVariant::Gains);
  const auto g1 = std::get<ScaledPrototype>(m.f(1).variant()).g;
  const auto g2 = std::get<ScaledPrototype>(m.f(2).variant()).g;
  CHECK(g1 == Approx(1 / std::tan(kPi / 2 - 1.0 / 40)).epsilon(1e-12));
  CHECK(g2 == Approx(1 / std::tan(kPi / 2 - 1.0 / 200)).epsilon(1e-12));
  CHECK(max_abs(pattern_residuals(m, scenarios::nine_node_target())) < 1e-10);
}

TEST_CASE("gains report sign mismatches") {
  const Digraph g(2, {{1, 2, 1}, {2, 1, 1}});
  const TargetPattern t{1.0, {0.0, kPi / 2}};
  try {
    assign_by_gains(g, {0, 0}, {0, 0}, BarrierFunction::tan_half(1.0), t);
    FAIL("expected SignMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SignMismatch);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("weight search finds the smallest multiplier") {
  const auto p = BarrierFunction::tan_half(1.0);
  // alpha * 0.5 - 1.2 becomes positive first at alpha = 3.
  CHECK(search_weights_for_sign(0.5, -1.2, p, +1) == 3);
  CHECK(search_weights_for_sign(0.5, 0.3, p, +1) == 1);
  // A rational offset cycles through finitely many residues.
  CHECK_FALSE(search_weights_for_sign(2 * kPi, -0.5, p, +1, 50).has_value());
  CHECK(search_ratio_for_sign({1, 2}, {0.2, 0.1}, -1.0, p, +1) == 3);
}

TEST_CASE("irrational edges of the example target") {
  const Digraph g = scenarios::example_graph();
  const auto edges = irrational_edges(g, scenarios::example_target());
  // Exactly the edges touching nodes 2, 6 and 7, whose offsets carry 1/50 or 1/100.
  for (const Edge& e : g.edges()) {
    const bool touched = e.src == 2 || e.dst == 2 || e.src == 6 || e.dst == 6 || e.src == 7 || e.dst == 7;
    const bool listed = std::any_of(edges.begin(), edges.end(), [&](const Edge& x) { return x.src == e.src && x.dst == e.dst; });
    CHECK(listed == touched);
  }
}

TEST_CASE("minimal edge subgraph is connected and cannot lose a free edge") {
  const Digraph g = scenarios::example_graph();
  const auto required = irrational_edges(g, scenarios::example_target());
  const Digraph h = minimal_edge_subgraph(g, required);
  CHECK(is_connected(h));
  for (const Edge& e : required) CHECK(contains(h, e));
  for (const Edge& e : h.edges()) CHECK(contains(g, e));
  // Dropping any edge not forced by `required` disconnects the result.
  for (const Edge& e : h.edges()) {
    if (std::any_of(required.begin(), required.end(), [&](const Edge& r) { return r.src == e.src && r.dst == e.dst; }))
      continue;
    std::vector<Edge> rest;
    for (const Edge& x : h.edges())
      if (!(x.src == e.src && x.dst == e.dst)) rest.push_back(x);
    CHECK_FALSE(is_connected(Digraph(h.node_count(), rest)));
  }
}

TEST_CASE("weight design on the example graph") {
  const Digraph g = scenarios::example_graph();
  const auto target = scenarios::example_target();
  const DesignSolution s = design_weights(g, scenarios::nine_node_omega(), scenarios::nine_node_phi(),
                                          BarrierFunction::tan_half(1.0), target);
  CHECK(is_connected(s.model.graph()));
  CHECK(s.max_residual < 1e-9);
  CHECK(max_abs(pattern_residuals(s.model, target)) < 1e-9);
  for (const Edge& e : s.model.graph().edges()) CHECK(contains(g, e));
}

TEST_CASE("three-ring multi-pattern couplings") {
  const Digraph g(3, {{2, 1, 1}, {3, 2, 1}, {1, 3, 1}});
  const std::vector<double> phi{-3 * kPi / 4, -3 * kPi / 4, kPi / 2}, omega{-2, 0, 2};
  const auto patterns = scenarios::three_ring_patterns();
  const MultiPatternCheck check = multi_pattern_feasible(g, phi, patterns);
  REQUIRE(check.feasible);
  const auto f = construct_multi_pattern_couplings(g, phi, omega, patterns);
  const NetworkModel designed(g, omega, phi, f);
  const NetworkModel published = scenarios::three_ring_model();
  for (const auto& p : patterns) {
    CHECK(max_abs(pattern_residuals(designed, p)) < 1e-12);
    CHECK(max_abs(pattern_residuals(published, p)) < 1e-12);
  }
  // Same values as the published couplings at both prescribed arguments.
  for (std::size_t k = 0; k < patterns.size(); ++k)
    for (NodeId i = 1; i <= 3; ++i)
      CHECK(designed.f(i).eval(check.theta[k][i - 1]) == Approx(published.f(i).eval(check.theta[k][i - 1])));
}

TEST_CASE("reversed ordering is infeasible") {
  const Digraph g(3, {{2, 1, 1}, {3, 2, 1}, {1, 3, 1}});
  const std::vector<double> phi{-3 * kPi / 4, -3 * kPi / 4, kPi / 2};
  auto patterns = scenarios::three_ring_patterns();
  std::swap(patterns[0].omega_bar, patterns[1].omega_bar);
  CHECK_FALSE(multi_pattern_feasible(g, phi, patterns).feasible);
  CHECK(code_of([&] { construct_multi_pattern_couplings(g, phi, {-2, 0, 2}, patterns); }) ==
        ErrorCode::InfeasibleOrdering);
}

TEST_CASE("three patterns use a monotone interpolant") {
  // Ring 1 -> 2 -> 3 -> 1: every argument equals -2pi/3, 0 or 2pi/3 in the three formations.
  const Digraph ring(3, {{1, 2, 1}, {2, 3, 1}, {3, 1, 1}});
  const std::vector<TargetPattern> three{
      {-1.0, {0.0, 2 * kPi / 3, 4 * kPi / 3}}, {0.5, {0.0, 0.0, 0.0}}, {1.5, {0.0, 4 * kPi / 3, 2 * kPi / 3}}};
  const std::vector<double> phi{0.0, 0.0, 0.0}, omega{0.0, 0.0, 0.0};
  REQUIRE(multi_pattern_feasible(ring, phi, three).feasible);
  const auto f = construct_multi_pattern_couplings(ring, phi, omega, three);
  CHECK(std::holds_alternative<MonotonePiecewise>(f[0].variant()));
  const NetworkModel m(ring, omega, phi, f);
  for (const auto& p : three) CHECK(max_abs(pattern_residuals(m, p)) < 1e-12);
  // Swapping two frequencies breaks the order at every node.
  auto swapped = three;
  std::swap(swapped[0].omega_bar, swapped[2].omega_bar);
  CHECK_FALSE(multi_pattern_feasible(ring, phi, swapped).feasible);
}

TEST_CASE("star couplings solve the stated two-point systems") {
  const int n = 9;
  const NetworkModel m = scenarios::star_model(n);
  // Node 1: [tan(-(N-1)pi/(2N)) 1; tan((N-1)pi/(2N)) 1] [a; b] = [0; 1].
  const double t = std::tan((n - 1) * kPi / (2 * n));
  const double a1 = 1 / (2 * t), b1 = 0.5;
  const auto& f1 = std::get<TanHalf>(m.f(1).variant());
  CHECK(f1.gain == Approx(a1));
  CHECK(f1.offset == Approx(b1));
  for (const auto& p : scenarios::star_patterns(n)) CHECK(max_abs(pattern_residuals(m, p)) < 1e-12);
}

TEST_CASE("saturating the shared prototype leaves one class") {
  const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::Gains);
  const SaturationReport r = saturate_for_uniqueness(m, scenarios::nine_node_target(), 0.01);
  REQUIRE(r.shared_prototype);
  // Shared prototype cut just outside its extreme design values (-200, 40).
  CHECK(r.bounds[0].first == Approx(-200.01).margin(0.01));
  CHECK(r.bounds[0].second == Approx(40.01).margin(0.01));
  REQUIRE(r.excluded.size() == 2);
  CHECK(std::max(r.excluded[0], r.excluded[1]) > 2);
  CHECK(std::min(r.excluded[0], r.excluded[1]) < 0);
  CHECK(r.surviving.empty());
  CHECK(r.realizable_classes == 1);
}

TEST_CASE("saturation on a single-pattern model only cuts") {
  const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::PhaseBias);
  const SaturationReport r = saturate_for_uniqueness(m, scenarios::nine_node_target(), 0.5);
  CHECK(r.excluded.empty());
  CHECK(r.surviving.empty());
  CHECK(r.realizable_classes == 1);
  CHECK(max_abs(pattern_residuals(r.model, scenarios::nine_node_target())) < 1e-10);
}
