#pragma once

// Synthesis of couplings, gains, phase biases and weights that realize
// prescribed central patterns.

#include "bcpg/analysis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcpg {

struct TargetPattern {
  double omega_bar = 0.0;
  /// Node phases; delta[0] is the reference and is normally 0.
  std::vector<double> delta;
};

/// Delta_ij = Delta_j - Delta_i reduced to [-pi, pi), aligned with g.edges().
std::vector<double> edge_differences(const Digraph& g, const TargetPattern& target);

/// Theta_i = sum_j alpha_ij Delta_ij + phi_i reduced to [-pi, pi).
std::vector<double> target_arguments(const Digraph& g, const std::vector<double>& phi, const TargetPattern& target);

/// Per-node omega_bar - omega_i - f_i(Theta_i).
std::vector<double> pattern_residuals(const NetworkModel& m, const TargetPattern& target);

struct DesignSolution {
  std::string mode;
  NetworkModel model;
  std::vector<double> certificate;
  double max_residual = 0.0;
  std::vector<std::string> notes;
};

/// phi_i = f_i^{-1}(omega_bar - omega_i) - sum_j alpha_ij Delta_ij, reduced.
DesignSolution assign_by_phase_bias(const Digraph& g, const std::vector<double>& omega,
                                    const std::vector<BarrierFunction>& f, const TargetPattern& target);

/// g_i = (omega_bar - omega_i) / prototype(Theta_i). Throws SignMismatch
/// naming every node whose signs disagree.
DesignSolution assign_by_gains(const Digraph& g, const std::vector<double>& omega, const std::vector<double>& phi,
                               const BarrierFunction& prototype, const TargetPattern& target);

/// Smallest alpha in [1, max_alpha] with sgn(prototype(alpha * delta_ij + rest)) = target_sign,
/// where rest collects phi_i and the fixed contributions of other neighbors.
std::optional<std::int64_t> search_weights_for_sign(double delta_ij, double rest, const BarrierFunction& prototype,
                                                    int target_sign, std::int64_t max_alpha = 1000);

/// Prototypical ratio variant: smallest beta with
/// sgn(prototype(beta * sum_j ratio_j delta_ij + phi_i)) = target_sign.
std::optional<std::int64_t> search_ratio_for_sign(const std::vector<std::int64_t>& ratios,
                                                  const std::vector<double>& deltas, double phi_i,
                                                  const BarrierFunction& prototype, int target_sign,
                                                  std::int64_t max_beta = 1000);

/// Edges whose Delta_ij / (2 pi) has no rational approximation p/q with
/// q <= max_den within tol.
std::vector<Edge> irrational_edges(const Digraph& g, const TargetPattern& target, int max_den = 64,
                                   double tol = 1e-9);

/// Connected spanning subgraph of g containing `required`, completed first
/// inside the iSCC of g and then over the whole node set.
Digraph minimal_edge_subgraph(const Digraph& g, const std::vector<Edge>& required);

/// Weight-only design: pick the candidate edge set, complete it to a
/// connected subgraph, search integer weights for the sign condition at
/// every node and finish with gains. Throws BoundExhausted when a node
/// cannot be fixed within max_alpha.
DesignSolution design_weights(const Digraph& g, const std::vector<double>& omega, const std::vector<double>& phi,
                              const BarrierFunction& prototype, const TargetPattern& target,
                              std::optional<std::vector<Edge>> candidates = std::nullopt,
                              std::int64_t max_alpha = 1000);

struct MultiPatternCheck {
  bool feasible = false;
  /// Pattern indices sorted by omega_bar.
  std::vector<std::size_t> order;
  /// theta[k][i-1] = Theta_i^k.
  std::vector<std::vector<double>> theta;
  std::string reason;
};

/// Ordering test: Theta_i^k must follow the order of
/// omega_bar^k at every node, with ties matching ties.
MultiPatternCheck multi_pattern_feasible(const Digraph& g, const std::vector<double>& phi,
                                         const std::vector<TargetPattern>& patterns);

/// Per-node barrier functions through (Theta_i^k, omega_bar^k - omega_i).
/// Throws InfeasibleOrdering when the ordering test fails.
std::vector<BarrierFunction> construct_multi_pattern_couplings(const Digraph& g, const std::vector<double>& phi,
                                                               const std::vector<double>& omega,
                                                               const std::vector<TargetPattern>& patterns);

struct SaturationReport {
  NetworkModel model;
  double kept_omega_bar = 0.0;
  /// Couplings were g_i * p for one prototype p, and p itself was cut.
  bool shared_prototype = false;
  /// Bounds (M-, M+) of the cut prototype, or per node otherwise.
  std::vector<std::pair<double, double>> bounds;
  /// omega_bar of alternative classes of the original model that the bounds exclude.
  std::vector<double> excluded;
  std::vector<double> surviving;
  /// Classes of the saturated model that still have a central pattern.
  std::size_t realizable_classes = 0;
};

/// When every f_i is g_i * p for a common prototype p, p is cut to
/// (min_i p(Theta_i) - margin, max_i p(Theta_i) + margin) over the kept
/// arguments Theta_i, with delta = margin. Otherwise each f_i is cut to
/// (y_i - margin, y_i + margin), y_i = omega_bar - omega_i, delta = margin / 10.
/// An alternative is excluded when some omega_bar' - omega_i leaves the new
/// range of f_i. Throws CannotSeparate when nothing is excluded although
/// alternatives exist.
SaturationReport saturate_for_uniqueness(const NetworkModel& m, const TargetPattern& keep, double margin,
                                         const EnumerationOptions& options = {});

}  // namespace bcpg
