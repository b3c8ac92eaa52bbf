#pragma once

// Built-in example networks and their initial conditions.

#include "bcpg/design.hpp"
#include "bcpg/simulation.hpp"

#include <string>
#include <vector>

namespace bcpg::scenarios {

struct InitialCondition {
  std::string label;
  std::vector<double> theta0;
};

/// Nine-node example: iSCC {1, 2} feeding a follower tree. alpha_21 is the
/// weight of 1 -> 2.
Digraph nine_node_graph(std::int64_t alpha21 = 2);
TargetPattern nine_node_target();
std::vector<double> nine_node_phi();
std::vector<double> nine_node_omega();

enum class NineNodeVariant {
  Gains,       // fixed phase biases, alpha_21 = 2, gains on tan(s/2)
  PhaseBias,   // phi_1 = 1/25, phi_2 = -1/25, alpha_21 = 1
  Saturated,   // as Gains with the prototype cut to (-200 - delta, 40 + delta)
};
NetworkModel nine_node_model(NineNodeVariant variant);
/// theta_1(0) in {pi, 0, -pi/2}, other phases zero.
std::vector<InitialCondition> nine_node_initial_conditions();

/// Larger graph containing the nine-node one, with the original formation
/// used for the minimal-edge procedure.
Digraph example_graph();
TargetPattern example_target();

/// Two agents coupled both ways; the alternative pattern sits epsilon from a boundary.
NetworkModel two_agent_model(double epsilon = 0.1);
std::vector<InitialCondition> two_agent_initial_conditions();
std::vector<TargetPattern> two_agent_patterns(double epsilon = 0.1);

/// Directed three-ring carrying two rotating formations.
NetworkModel three_ring_model();
std::vector<InitialCondition> three_ring_initial_conditions();
std::vector<TargetPattern> three_ring_patterns();

/// Star on odd N with a balanced and a synchronized pattern.
NetworkModel star_model(int n = 9);
std::vector<InitialCondition> star_initial_conditions(int n = 9);
std::vector<TargetPattern> star_patterns(int n = 9);

/// Unit-weight directed ring i -> i+1 with tan(s/2) couplings.
NetworkModel ring_model(int n, const std::vector<double>& phi, const std::vector<double>& omega);

/// Names understood by model_by_name.
std::vector<std::string> names();
NetworkModel model_by_name(const std::string& name);

}  // namespace bcpg::scenarios
