#pragma once

// Network of phase agents: digraph, intrinsic frequencies, phase biases and
// per-node barrier couplings, plus the cell geometry of the state space.

#include "bcpg/coupling.hpp"
#include "bcpg/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bcpg {

/// Integer vector {n_i} indexing a cell; index i-1 holds node i.
using SequenceIndex = std::vector<std::int64_t>;

/// Reported arguments within this distance of a cell edge count as on it.
inline constexpr double kBoundaryGuard = 1e-9;

class NetworkModel {
 public:
  /// Validates connectivity, vector lengths and phi in [-pi, pi).
  NetworkModel(Digraph graph, std::vector<double> omega, std::vector<double> phi,
               std::vector<BarrierFunction> f);

  int size() const { return graph_.node_count(); }
  const Digraph& graph() const { return graph_; }
  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<BarrierFunction>& couplings() const { return f_; }
  double omega(NodeId i) const { return omega_[i - 1]; }
  double phi(NodeId i) const { return phi_[i - 1]; }
  const BarrierFunction& f(NodeId i) const { return f_[i - 1]; }

  const LaplacianMatrix& laplacian() const { return laplacian_; }
  const LeftNullVector& zeta() const { return zeta_; }
  /// phi_i / pi, rationalized.
  const RationalVector& phi_over_pi() const { return phi_over_pi_; }
  /// Shared exact solver grounded at node 1.
  const GroundedSolver& solver() const { return solver_; }
  bool any_saturated() const;

 private:
  Digraph graph_;
  std::vector<double> omega_;
  std::vector<double> phi_;
  std::vector<BarrierFunction> f_;
  LaplacianMatrix laplacian_;
  LeftNullVector zeta_;
  RationalVector phi_over_pi_;
  GroundedSolver solver_;
};

/// nu_i = sum_j alpha_ij (theta_j - theta_i).
std::vector<double> coupling_sums(const NetworkModel& m, std::span<const double> theta);

/// nu_i + phi_i.
std::vector<double> coupling_arguments(const NetworkModel& m, std::span<const double> theta);

/// Right-hand side omega_i + f_i(nu_i + phi_i).
void vector_field(const NetworkModel& m, std::span<const double> theta, std::span<double> dtheta);

/// Cell of a lifted state: n_i = floor((nu_i + phi_i + pi) / (2 pi)) without
/// reducing theta first.
SequenceIndex lifted_cell(const NetworkModel& m, std::span<const double> theta);

/// Cell of theta reduced to [-pi, pi)^N. Throws OnBoundary when a reduced
/// argument is within kBoundaryGuard of +-pi.
SequenceIndex classify_state(const NetworkModel& m, std::span<const double> theta);

/// Smallest distance of nu_i + phi_i - 2 n_i pi to +-pi over all nodes.
double cell_margin(const NetworkModel& m, std::span<const double> theta, const SequenceIndex& n);

/// Box |n_i| <= d_i from the weighted in-degrees.
std::vector<std::int64_t> degree_bounds(const NetworkModel& m);

}  // namespace bcpg
