#pragma once

// Central patterns of a network model: admissible cells, the common
// frequency equation, formations, equivalence classes and the atlas.

#include "bcpg/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcpg {

struct CentralPattern {
  double omega_bar = 0.0;
  /// Node phases with delta[0] = 0 (node 1 is the reference).
  std::vector<double> delta;
  /// Delta_ij = Delta_j - Delta_i reduced to [-pi, pi), aligned with graph().edges().
  std::vector<double> delta_edges;
  /// Sequence the pattern was solved from.
  SequenceIndex sequence;
  /// Lexicographically smallest member of the class, when known.
  SequenceIndex class_id;
  /// max_i |omega_bar - omega_i - f_i(sum_j alpha_ij Delta_ij + phi_i)|.
  double residual = 0.0;
};

/// Exact test of the open-cell condition on the iSCC. Sequences outside the
/// box |n_i| <= d_i are rejected.
bool admissible_extended(const NetworkModel& m, const SequenceIndex& n);

/// Whether some theta in [-pi+eps, pi-eps]^N has every argument inside the
/// eps-shrunk band of cell n; decided by exact rational simplex.
bool admissible_torus(const NetworkModel& m, const SequenceIndex& n, double eps = 1e-6);

/// F(w) = sum_{i in S} zeta_i (f_i^{-1}(w - omega_i) + 2 n_i pi - phi_i), with
/// saturated inverses clamped to +-pi.
double frequency_residual(const NetworkModel& m, const SequenceIndex& n, double omega_bar);

/// Unique root of F. Throws NoSolution for inadmissible n and
/// SaturationEscape when a saturated coupling cannot produce omega_bar - omega_i.
double solve_common_frequency(const NetworkModel& m, const SequenceIndex& n);

/// Formation for a solved frequency. Throws Inconsistent if the frequency
/// equation residual exceeds 1e-9.
CentralPattern solve_formation(const NetworkModel& m, const SequenceIndex& n, double omega_bar);

/// Frequency then formation.
CentralPattern solve_pattern(const NetworkModel& m, const SequenceIndex& n);

/// Same weighted iSCC sum and an integral grounded solve of n1 - n2.
bool equivalent(const NetworkModel& m, const SequenceIndex& n1, const SequenceIndex& n2);

/// Entries of n on the iSCC nodes, in node order.
SequenceIndex iscc_projection(const NetworkModel& m, const SequenceIndex& n);

/// True when every follower has one in-neighbor with unit weight, so
/// equivalence is decided by the iSCC coordinates alone.
bool followers_are_unit_chains(const NetworkModel& m);

struct PatternClass {
  SequenceIndex id;
  /// Indices into PartitionAtlas::admissible.
  std::vector<std::size_t> members;
  std::optional<CentralPattern> pattern;
  /// Why no pattern exists (saturated couplings only).
  std::string unrealizable_reason;
};

struct PartitionAtlas {
  std::vector<SequenceIndex> admissible;
  std::vector<PatternClass> classes;
  std::uint64_t candidates = 0;

  std::size_t n_patterns() const { return classes.size(); }
  std::size_t n_realizable() const;
  /// Class index of an admissible sequence, or -1.
  int class_of(const NetworkModel& m, const SequenceIndex& n) const;
};

struct EnumerationOptions {
  std::uint64_t budget = 10'000'000;
};

/// Throws BudgetExceeded when prod_i (2 d_i + 1) exceeds the budget.
PartitionAtlas enumerate_classes(const NetworkModel& m, const EnumerationOptions& options = {});

struct NsInterval {
  Rational lower;  // open endpoints
  Rational upper;
  std::int64_t first = 0;  // smallest integer inside
  std::int64_t last = -1;  // largest integer inside
  std::int64_t count = 0;
  std::int64_t zeta_total = 0;
};

/// Open interval of admissible n_S = zeta^T n.
NsInterval ns_interval(const NetworkModel& m);

}  // namespace bcpg
