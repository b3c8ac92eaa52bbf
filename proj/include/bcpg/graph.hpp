#pragma once

// Exact graph algebra for weighted digraphs with positive integer weights:
// strongly connected structure, Laplacian, left null vector and grounded
// solves. Floating point never enters this module.

#include "bcpg/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bcpg {

/// 1-based dense node index.
using NodeId = int;
using NodeSet = std::vector<NodeId>;

/// Directed edge src -> dst; `src` belongs to the in-neighborhood of `dst`
/// and `weight` is the coupling weight of dst on src.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t weight = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Digraph {
 public:
  Digraph() = default;
  /// Validates: no self-loops, one edge per ordered pair, weights >= 1.
  /// Edges are stored sorted by (dst, src).
  Digraph(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Weight of src -> dst, or 0 when absent.
  std::int64_t weight(NodeId src, NodeId dst) const;
  bool has_edge(NodeId src, NodeId dst) const { return weight(src, dst) != 0; }

  /// Edges entering node i (the neighborhood N_i with weights).
  std::span<const Edge> in_edges(NodeId i) const;
  /// Weighted in-degree d_i.
  std::int64_t in_degree(NodeId i) const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> in_offsets_;
};

/// Maximal strongly connected node sets. Each set is sorted; the list is
/// sorted by smallest member.
std::vector<NodeSet> strongly_connected_components(const Digraph& g);

/// SCCs without incoming edges from outside the component.
std::vector<NodeSet> independent_sccs(const Digraph& g);

/// True iff the digraph has exactly one iSCC (contains a spanning tree).
bool is_connected(const Digraph& g);

/// Nodes reachable from `roots` (roots included), sorted.
NodeSet reachable_from(const Digraph& g, const NodeSet& roots);

/// Induced subgraph on `nodes`, relabelled 1..|nodes| in the given order.
Digraph induced_subgraph(const Digraph& g, const NodeSet& nodes);

/// Integer Laplacian L = D - A with L(i, j) = -weight(j -> i).
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  explicit LaplacianMatrix(const Digraph& g);

  int size() const { return n_; }
  /// 1-based access.
  std::int64_t operator()(NodeId i, NodeId j) const { return entries_[(i - 1) * n_ + (j - 1)]; }
  std::int64_t row_sum(NodeId i) const;

 private:
  int n_ = 0;
  std::vector<std::int64_t> entries_;
};

/// Positive integer weights on the unique iSCC with zeta^T L = 0 and
/// coprime entries; zero on followers.
struct LeftNullVector {
  std::vector<std::int64_t> zeta;  // length N, index i-1 for node i
  NodeSet iscc_nodes;

  std::int64_t at(NodeId i) const { return zeta[i - 1]; }
  std::int64_t total() const;
};

/// Computed by exact rational elimination on the iSCC Laplacian.
/// Throws NotConnected when more than one iSCC exists.
LeftNullVector left_null_vector(const Digraph& g);

/// Exact solver for -L x = rhs with x[ground] = 0 on a connected digraph.
///
/// One elimination of [-L without the ground column | I] yields a reduced
/// operator P with x = P rhs for every consistent rhs, plus a consistency
/// functional c (proportional to zeta) with c rhs = 0 exactly when a
/// solution exists.
class GroundedSolver {
 public:
  GroundedSolver(const LaplacianMatrix& L, NodeId ground);

  int size() const { return n_; }
  NodeId ground() const { return ground_; }

  bool consistent(std::span<const Rational> rhs) const;
  /// Throws Inconsistent when c rhs != 0.
  RationalVector solve(std::span<const Rational> rhs) const;
  /// Integer right-hand sides: returns the solution when it is integral.
  bool integral_solution(std::span<const std::int64_t> rhs) const;

  /// Row-major (N x N) map from rhs to x (the ground row is zero).
  const std::vector<Rational>& solution_operator() const { return op_; }
  const RationalVector& consistency_functional() const { return consistency_; }

 private:
  int n_ = 0;
  NodeId ground_ = 1;
  std::vector<Rational> op_;
  RationalVector consistency_;
  // Integer images of op_ and consistency_ over a common denominator, used
  // by integral_solution when everything fits in 64 bits.
  bool scaled_fits_ = false;
  std::int64_t scale_ = 1;
  std::vector<std::int64_t> op_scaled_;
  std::vector<std::int64_t> consistency_scaled_;
};

/// One-shot grounded solve. Throws Inconsistent if zeta^T rhs != 0 and
/// NotConnected if L has rank below N-1.
RationalVector grounded_solve(const LaplacianMatrix& L, std::span<const Rational> rhs,
                              NodeId ground);

}  // namespace bcpg
