#include "bcpg/scenarios.hpp"

#include "bcpg/error.hpp"

#include <cmath>
#include <numbers>

namespace bcpg::scenarios {

namespace {

constexpr double kPi = std::numbers::pi;

// One prototype, gains fitted to the target.
NetworkModel fitted(const Digraph& g, const std::vector<double>& phi, const BarrierFunction& prototype) {
  return assign_by_gains(g, nine_node_omega(), phi, prototype, nine_node_target()).model;
}

}  // namespace

Digraph nine_node_graph(std::int64_t alpha21) {
  return Digraph(9, {{1, 2, alpha21},
                     {2, 1, 1},
                     {2, 3, 1},
                     {2, 5, 1},
                     {2, 6, 1},
                     {6, 4, 1},
                     {5, 8, 1},
                     {8, 7, 1},
                     {6, 9, 1}});
}

TargetPattern nine_node_target() {
  return {1.0,
          {0.0, -1.0 / 50, kPi / 4, kPi / 2, 3 * kPi / 4, kPi + 1.0 / 50, 5 * kPi / 4 + 1.0 / 100,
           3 * kPi / 2 + 1.0 / 50, 7 * kPi / 4 + 1.0 / 100}};
}

std::vector<double> nine_node_phi() {
  return {kPi - 3.0 / 100, kPi - 3.0 / 100, 0.0, -kPi + 1.0 / 100, 0.0, -kPi + 1.0 / 100, -kPi / 2, 0.0, 0.0};
}

std::vector<double> nine_node_omega() { return {0, 2, 2, 2, 2, 2, 2, 2, 2}; }

NetworkModel nine_node_model(NineNodeVariant variant) {
  const BarrierFunction tan_half = BarrierFunction::tan_half(1.0);
  switch (variant) {
    case NineNodeVariant::Gains:
      return fitted(nine_node_graph(2), nine_node_phi(), tan_half);
    case NineNodeVariant::PhaseBias: {
      auto phi = nine_node_phi();
      phi[0] = 1.0 / 25;
      phi[1] = -1.0 / 25;
      return fitted(nine_node_graph(1), phi, tan_half);
    }
    case NineNodeVariant::Saturated: {
      const double delta = 0.01;
      return fitted(nine_node_graph(2), nine_node_phi(), saturate(tan_half, -200 - delta, 40 + delta, delta));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown variant");
}

std::vector<InitialCondition> nine_node_initial_conditions() {
  std::vector<InitialCondition> out;
  for (auto [label, t1] : {std::pair{"theta1=pi", kPi}, {"theta1=0", 0.0}, {"theta1=-pi/2", -kPi / 2}}) {
    std::vector<double> theta(9, 0.0);
    theta[0] = t1;
    out.push_back({label, theta});
  }
  return out;
}

Digraph example_graph() {
  return Digraph(9, {{1, 2, 1},
                     {2, 1, 1},
                     {2, 3, 1},
                     {2, 5, 1},
                     {2, 6, 1},
                     {6, 4, 1},
                     {5, 8, 1},
                     {8, 7, 1},
                     {7, 8, 1},
                     {6, 9, 1},
                     {1, 3, 1},
                     {3, 4, 1},
                     {4, 5, 1},
                     {4, 8, 1},
                     {5, 9, 1}});
}

TargetPattern example_target() {
  return {1.0,
          {0.0, -1.0 / 50, kPi / 4, kPi / 2, 3 * kPi / 4, kPi + 1.0 / 100, 5 * kPi / 4 + 1.0 / 100, 3 * kPi / 2,
           7 * kPi / 4}};
}

NetworkModel two_agent_model(double epsilon) {
  const double t = std::tan(kPi / 4);
  auto f1 = BarrierFunction::shifted_scaled_tan_half(1.0, t, std::tan((kPi - epsilon) / 2) + t, 1.0);
  auto f2 = BarrierFunction::shifted_scaled_tan_half(1.0, t, std::tan(epsilon / 2) + t, -1.0);
  return NetworkModel(Digraph(2, {{1, 2, 1}, {2, 1, 1}}), {0.0, 2.0}, {kPi / 2, kPi / 2}, {f1, f2});
}

std::vector<InitialCondition> two_agent_initial_conditions() {
  return {{"theta=(0,0)", {0.0, 0.0}}, {"theta=(3pi/4,0)", {3 * kPi / 4, 0.0}}};
}

std::vector<TargetPattern> two_agent_patterns(double epsilon) {
  return {{1.0, {0.0, kPi}}, {2.0, {0.0, kPi / 2 - epsilon}}};
}

NetworkModel three_ring_model() {
  const double t24 = std::tan(kPi / 24), t12 = std::tan(kPi / 12);
  auto f1 = BarrierFunction::shifted_scaled_tan_half(2.0, t24, std::tan(7 * kPi / 24) + t24, 1.0);
  auto f2 = BarrierFunction::shifted_scaled_tan_half(2.0, t24, std::tan(7 * kPi / 24) + t24, -1.0);
  auto f3 = BarrierFunction::shifted_scaled_tan_half(2.0, t12, std::tan(5 * kPi / 12) - t12, -1.0);
  return NetworkModel(Digraph(3, {{2, 1, 1}, {3, 2, 1}, {1, 3, 1}}), {-2.0, 0.0, 2.0},
                      {-3 * kPi / 4, -3 * kPi / 4, kPi / 2}, {f1, f2, f3});
}

std::vector<InitialCondition> three_ring_initial_conditions() {
  return {{"theta=0", {0.0, 0.0, 0.0}}, {"theta3=-pi/3", {0.0, 0.0, -kPi / 3}}};
}

std::vector<TargetPattern> three_ring_patterns() {
  return {{-1.0, {0.0, 2 * kPi / 3, 4 * kPi / 3}}, {1.0, {0.0, 4 * kPi / 3, 2 * kPi / 3}}};
}

NetworkModel star_model(int n) {
  if (n < 3 || n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "star example needs odd N >= 3");
  std::vector<Edge> edges{{2, 1, 1}};
  for (int i = 2; i <= n; ++i) edges.push_back({1, i, 1});
  const double big = (n - 1) * kPi / n;
  std::vector<double> phi(n, 0.0);
  phi[0] = big;
  for (int i = (n + 3) / 2; i <= n; ++i) phi[i - 1] = big;

  // f_i = a_i tan(s/2) + b_i through (Theta_i, 0) and (Theta'_i, 1).
  auto two_point = [](double s0, double s1) {
    const double t0 = std::tan(s0 / 2), t1 = std::tan(s1 / 2);
    const double a = 1.0 / (t1 - t0);
    return BarrierFunction::tan_half(a, -a * t0);
  };
  std::vector<BarrierFunction> f;
  f.push_back(two_point(-big, big));
  for (int i = 2; i <= (n + 1) / 2; ++i) f.push_back(two_point(-2.0 * (i - 1) * kPi / n, 0.0));
  for (int i = (n + 3) / 2; i <= n; ++i) f.push_back(two_point(-(2.0 * i - n - 1) * kPi / n, big));
  return NetworkModel(Digraph(n, edges), std::vector<double>(n, 0.0), phi, f);
}

std::vector<InitialCondition> star_initial_conditions(int n) {
  std::vector<double> a(n), b(n, 0.0);
  for (int i = 1; i <= n; ++i) a[i - 1] = 2.0 * (i - 1) * kPi / n;
  a[1] = 0.0;
  b[1] = 2 * kPi / n;
  return {{"spread", a}, {"theta2=2pi/N", b}};
}

std::vector<TargetPattern> star_patterns(int n) {
  TargetPattern balanced{0.0, std::vector<double>(n)};
  for (int i = 1; i <= n; ++i) balanced.delta[i - 1] = 2.0 * (i - 1) * kPi / n;
  return {balanced, {1.0, std::vector<double>(n, 0.0)}};
}

NetworkModel ring_model(int n, const std::vector<double>& phi, const std::vector<double>& omega) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) edges.push_back({i, i % n + 1, 1});
  return NetworkModel(Digraph(n, edges), omega, phi,
                      std::vector<BarrierFunction>(n, BarrierFunction::tan_half(1.0)));
}

std::vector<std::string> names() {
  return {"nine-node", "nine-node-phase-bias", "nine-node-saturated", "two-agent", "three-ring", "star"};
}

NetworkModel model_by_name(const std::string& name) {
  if (name == "nine-node") return nine_node_model(NineNodeVariant::Gains);
  if (name == "nine-node-phase-bias") return nine_node_model(NineNodeVariant::PhaseBias);
  if (name == "nine-node-saturated") return nine_node_model(NineNodeVariant::Saturated);
  if (name == "two-agent") return two_agent_model();
  if (name == "three-ring") return three_ring_model();
  if (name == "star") return star_model();
  throw Error(ErrorCode::InvalidArgument, "unknown scenario " + name);
}

}  // namespace bcpg::scenarios
