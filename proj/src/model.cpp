#include "bcpg/model.hpp"

#include "bcpg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bcpg {

namespace {

constexpr double kPi = std::numbers::pi;

const Digraph& checked(const Digraph& g, std::size_t omega, std::size_t phi, std::size_t f) {
  const auto n = static_cast<std::size_t>(g.node_count());
  if (omega != n || phi != n || f != n)
    throw Error(ErrorCode::InvalidArgument, "omega, phi and f must have one entry per node");
  if (!is_connected(g)) throw Error(ErrorCode::NotConnected, "communication graph has no spanning tree");
  return g;
}

}  // namespace

NetworkModel::NetworkModel(Digraph graph, std::vector<double> omega, std::vector<double> phi,
                           std::vector<BarrierFunction> f)
    : graph_(std::move(checked(graph, omega.size(), phi.size(), f.size()))),
      omega_(std::move(omega)),
      phi_(std::move(phi)),
      f_(std::move(f)),
      laplacian_(graph_),
      zeta_(left_null_vector(graph_)),
      solver_(laplacian_, 1) {
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(omega_[i])) throw Error(ErrorCode::InvalidArgument, "omega must be finite");
    if (!(phi_[i] >= -kPi && phi_[i] < kPi))
      throw Error(ErrorCode::InvalidArgument, "phi_" + std::to_string(i + 1) + " outside [-pi, pi)");
    phi_over_pi_.push_back(angle_over_pi(phi_[i]));
  }
}

bool NetworkModel::any_saturated() const {
  return std::any_of(f_.begin(), f_.end(), [](const BarrierFunction& f) { return f.is_saturated(); });
}

std::vector<double> coupling_sums(const NetworkModel& m, std::span<const double> theta) {
  const int n = m.size();
  if (static_cast<int>(theta.size()) != n) throw Error(ErrorCode::InvalidArgument, "state length mismatch");
  std::vector<double> nu(n, 0.0);
  for (NodeId i = 1; i <= n; ++i) {
    double s = 0.0;
    for (const Edge& e : m.graph().in_edges(i)) s += static_cast<double>(e.weight) * (theta[e.src - 1] - theta[i - 1]);
    nu[i - 1] = s;
  }
  return nu;
}

std::vector<double> coupling_arguments(const NetworkModel& m, std::span<const double> theta) {
  auto arg = coupling_sums(m, theta);
  for (int i = 0; i < m.size(); ++i) arg[i] += m.phi()[i];
  return arg;
}

void vector_field(const NetworkModel& m, std::span<const double> theta, std::span<double> dtheta) {
  const auto arg = coupling_arguments(m, theta);
  for (int i = 0; i < m.size(); ++i) dtheta[i] = m.omega()[i] + m.couplings()[i].eval(arg[i]);
}

SequenceIndex lifted_cell(const NetworkModel& m, std::span<const double> theta) {
  const auto arg = coupling_arguments(m, theta);
  SequenceIndex n(arg.size());
  for (std::size_t i = 0; i < arg.size(); ++i)
    n[i] = static_cast<std::int64_t>(std::floor((arg[i] + kPi) / (2 * kPi)));
  return n;
}

SequenceIndex classify_state(const NetworkModel& m, std::span<const double> theta) {
  std::vector<double> reduced(theta.begin(), theta.end());
  for (double& t : reduced) t = reduce_angle(t);
  const SequenceIndex n = lifted_cell(m, reduced);
  if (cell_margin(m, reduced, n) < kBoundaryGuard)
    throw Error(ErrorCode::OnBoundary, "state lies on a cell boundary");
  return n;
}

double cell_margin(const NetworkModel& m, std::span<const double> theta, const SequenceIndex& n) {
  const auto arg = coupling_arguments(m, theta);
  double margin = kPi;
  for (std::size_t i = 0; i < arg.size(); ++i) {
    const double r = arg[i] - 2.0 * kPi * static_cast<double>(n[i]);
    margin = std::min(margin, kPi - std::abs(r));
  }
  return margin;
}

std::vector<std::int64_t> degree_bounds(const NetworkModel& m) {
  std::vector<std::int64_t> d(m.size());
  for (NodeId i = 1; i <= m.size(); ++i) d[i - 1] = m.graph().in_degree(i);
  return d;
}

}  // namespace bcpg
