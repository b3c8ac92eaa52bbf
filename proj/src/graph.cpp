#include "bcpg/graph.hpp"

#include "bcpg/error.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

namespace bcpg {

namespace {

void require_node(const Digraph& g, NodeId i) {
  if (i < 1 || i > g.node_count())
    throw Error(ErrorCode::InvalidArgument, "node id " + std::to_string(i) + " out of range");
}

// Solves the square system A x = b exactly; A is row-major n x n.
// Throws NotConnected on a singular matrix (only used on reduced Laplacians).
RationalVector solve_square(std::vector<Rational> a, RationalVector b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (a[r * n + col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw Error(ErrorCode::NotConnected, "singular reduced Laplacian");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    const Rational inv = 1 / a[col * n + col];
    for (int c = col; c < n; ++c) a[col * n + c] *= inv;
    b[col] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r * n + col] == 0) continue;
      const Rational factor = a[r * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  return b;
}

}  // namespace

Digraph::Digraph(int node_count, std::vector<Edge> edges) : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 1) throw Error(ErrorCode::InvalidArgument, "digraph needs at least one node");
  for (const Edge& e : edges_) {
    if (e.src < 1 || e.src > node_count_ || e.dst < 1 || e.dst > node_count_)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.src == e.dst) throw Error(ErrorCode::InvalidArgument, "self-loop on node " + std::to_string(e.src));
    if (e.weight < 1) throw Error(ErrorCode::InvalidArgument, "edge weights must be positive integers");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.dst != b.dst ? a.dst < b.dst : a.src < b.src;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].src == edges_[k - 1].src && edges_[k].dst == edges_[k - 1].dst)
      throw Error(ErrorCode::InvalidArgument, "duplicate edge " + std::to_string(edges_[k].src) + "->" +
                                                  std::to_string(edges_[k].dst));
  }
  in_offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) ++in_offsets_[e.dst];
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
}

std::int64_t Digraph::weight(NodeId src, NodeId dst) const {
  for (const Edge& e : in_edges(dst))
    if (e.src == src) return e.weight;
  return 0;
}

std::span<const Edge> Digraph::in_edges(NodeId i) const {
  require_node(*this, i);
  return std::span<const Edge>(edges_).subspan(in_offsets_[i - 1], in_offsets_[i] - in_offsets_[i - 1]);
}

std::int64_t Digraph::in_degree(NodeId i) const {
  std::int64_t d = 0;
  for (const Edge& e : in_edges(i)) d += e.weight;
  return d;
}

std::vector<NodeSet> strongly_connected_components(const Digraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<NodeId>> out(n + 1);
  for (const Edge& e : g.edges()) out[e.src].push_back(e.dst);

  // Tarjan.
  std::vector<int> index(n + 1, -1), low(n + 1, 0);
  std::vector<bool> on_stack(n + 1, false);
  std::vector<NodeId> stack;
  std::vector<NodeSet> components;
  int counter = 0;
  std::function<void(NodeId)> visit = [&](NodeId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (NodeId w : out[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      NodeSet comp;
      NodeId w = 0;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  };
  for (NodeId v = 1; v <= n; ++v)
    if (index[v] < 0) visit(v);
  std::sort(components.begin(), components.end());
  return components;
}

std::vector<NodeSet> independent_sccs(const Digraph& g) {
  const auto components = strongly_connected_components(g);
  std::vector<int> comp_of(g.node_count() + 1, 0);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (NodeId v : components[c]) comp_of[v] = static_cast<int>(c);
  std::vector<bool> has_incoming(components.size(), false);
  for (const Edge& e : g.edges())
    if (comp_of[e.src] != comp_of[e.dst]) has_incoming[comp_of[e.dst]] = true;
  std::vector<NodeSet> result;
  for (std::size_t c = 0; c < components.size(); ++c)
    if (!has_incoming[c]) result.push_back(components[c]);
  return result;
}

bool is_connected(const Digraph& g) { return independent_sccs(g).size() == 1; }

NodeSet reachable_from(const Digraph& g, const NodeSet& roots) {
  std::vector<std::vector<NodeId>> out(g.node_count() + 1);
  for (const Edge& e : g.edges()) out[e.src].push_back(e.dst);
  std::vector<bool> seen(g.node_count() + 1, false);
  std::vector<NodeId> frontier;
  for (NodeId r : roots) {
    require_node(g, r);
    if (!seen[r]) {
      seen[r] = true;
      frontier.push_back(r);
    }
  }
  while (!frontier.empty()) {
    NodeId v = frontier.back();
    frontier.pop_back();
    for (NodeId w : out[v]) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push_back(w);
      }
    }
  }
  NodeSet result;
  for (NodeId v = 1; v <= g.node_count(); ++v)
    if (seen[v]) result.push_back(v);
  return result;
}

Digraph induced_subgraph(const Digraph& g, const NodeSet& nodes) {
  std::vector<int> local(g.node_count() + 1, 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    require_node(g, nodes[k]);
    local[nodes[k]] = static_cast<int>(k) + 1;
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (local[e.src] != 0 && local[e.dst] != 0) edges.push_back({local[e.src], local[e.dst], e.weight});
  return Digraph(static_cast<int>(nodes.size()), std::move(edges));
}

LaplacianMatrix::LaplacianMatrix(const Digraph& g) : n_(g.node_count()), entries_(n_ * n_, 0) {
  for (const Edge& e : g.edges()) {
    entries_[(e.dst - 1) * n_ + (e.src - 1)] -= e.weight;
    entries_[(e.dst - 1) * n_ + (e.dst - 1)] += e.weight;
  }
}

std::int64_t LaplacianMatrix::row_sum(NodeId i) const {
  std::int64_t s = 0;
  for (int j = 1; j <= n_; ++j) s += (*this)(i, j);
  return s;
}

std::int64_t LeftNullVector::total() const { return std::accumulate(zeta.begin(), zeta.end(), std::int64_t{0}); }

LeftNullVector left_null_vector(const Digraph& g) {
  auto isccs = independent_sccs(g);
  if (isccs.size() != 1)
    throw Error(ErrorCode::NotConnected, "digraph has " + std::to_string(isccs.size()) + " iSCCs");
  LeftNullVector result;
  result.iscc_nodes = isccs.front();
  result.zeta.assign(g.node_count(), 0);
  const NodeSet& s = result.iscc_nodes;
  const int m = static_cast<int>(s.size());
  if (m == 1) {
    result.zeta[s[0] - 1] = 1;
    return result;
  }
  const LaplacianMatrix ls(induced_subgraph(g, s));
  // zeta_1 = 1; columns 2..m of zeta^T L_s = 0 determine the rest.
  std::vector<Rational> a((m - 1) * (m - 1));
  RationalVector b(m - 1);
  for (int r = 2; r <= m; ++r) {
    for (int k = 2; k <= m; ++k) a[(r - 2) * (m - 1) + (k - 2)] = Rational(ls(k, r));
    b[r - 2] = Rational(-ls(1, r));
  }
  RationalVector tail = solve_square(std::move(a), std::move(b), m - 1);
  RationalVector z(m);
  z[0] = 1;
  std::copy(tail.begin(), tail.end(), z.begin() + 1);

  BigInt lcm_den = 1, gcd_num = 0;
  for (const Rational& q : z) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
  std::vector<BigInt> ints(m);
  for (int k = 0; k < m; ++k) {
    Rational scaled = z[k] * lcm_den;
    ints[k] = scaled.get_num();
    mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), ints[k].get_mpz_t());
  }
  for (int k = 0; k < m; ++k) {
    BigInt v = ints[k] / gcd_num;
    if (v <= 0) throw Error(ErrorCode::NotConnected, "left null vector is not positive on the iSCC");
    result.zeta[s[k] - 1] = to_int64(v);
  }
  return result;
}

GroundedSolver::GroundedSolver(const LaplacianMatrix& L, NodeId ground) : n_(L.size()), ground_(ground) {
  if (ground < 1 || ground > n_) throw Error(ErrorCode::InvalidArgument, "ground node out of range");
  const int unknowns = n_ - 1;
  const int width = unknowns + n_;
  // Unknown columns: nodes other than ground, in increasing order.
  std::vector<NodeId> unknown_node;
  for (NodeId v = 1; v <= n_; ++v)
    if (v != ground) unknown_node.push_back(v);

  std::vector<Rational> m(n_ * width);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < unknowns; ++c) m[r * width + c] = Rational(-L(r + 1, unknown_node[c]));
    m[r * width + unknowns + r] = 1;
  }
  int row = 0;
  for (int col = 0; col < unknowns; ++col, ++row) {
    int pivot = -1;
    for (int r = row; r < n_; ++r) {
      if (m[r * width + col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw Error(ErrorCode::NotConnected, "Laplacian rank is below N-1");
    if (pivot != row)
      for (int c = 0; c < width; ++c) std::swap(m[pivot * width + c], m[row * width + c]);
    const Rational inv = 1 / m[row * width + col];
    for (int c = 0; c < width; ++c) m[row * width + c] *= inv;
    for (int r = 0; r < n_; ++r) {
      if (r == row || m[r * width + col] == 0) continue;
      const Rational factor = m[r * width + col];
      for (int c = 0; c < width; ++c) m[r * width + c] -= factor * m[row * width + c];
    }
  }
  op_.assign(n_ * n_, Rational(0));
  for (int k = 0; k < unknowns; ++k) {
    const NodeId v = unknown_node[k];
    for (int c = 0; c < n_; ++c) op_[(v - 1) * n_ + c] = m[k * width + unknowns + c];
  }
  consistency_.resize(n_);
  for (int c = 0; c < n_; ++c) consistency_[c] = m[(n_ - 1) * width + unknowns + c];

  BigInt den = 1;
  for (const Rational& q : op_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  BigInt cden = 1;
  for (const Rational& q : consistency_) mpz_lcm(cden.get_mpz_t(), cden.get_mpz_t(), q.get_den_mpz_t());
  scaled_fits_ = den.fits_slong_p();
  if (scaled_fits_) scale_ = den.get_si();
  for (const Rational& q : op_) {
    const BigInt v = q.get_num() * (den / q.get_den());
    if (!v.fits_slong_p()) scaled_fits_ = false;
    op_scaled_.push_back(scaled_fits_ ? v.get_si() : 0);
  }
  for (const Rational& q : consistency_) {
    const BigInt v = q.get_num() * (cden / q.get_den());
    if (!v.fits_slong_p()) scaled_fits_ = false;
    consistency_scaled_.push_back(scaled_fits_ ? v.get_si() : 0);
  }
}

bool GroundedSolver::consistent(std::span<const Rational> rhs) const {
  if (static_cast<int>(rhs.size()) != n_) throw Error(ErrorCode::InvalidArgument, "rhs length mismatch");
  Rational acc = 0;
  for (int c = 0; c < n_; ++c) acc += consistency_[c] * rhs[c];
  return acc == 0;
}

RationalVector GroundedSolver::solve(std::span<const Rational> rhs) const {
  if (!consistent(rhs)) throw Error(ErrorCode::Inconsistent, "zeta^T rhs != 0");
  RationalVector x(n_);
  for (int r = 0; r < n_; ++r) {
    Rational acc = 0;
    for (int c = 0; c < n_; ++c) {
      const Rational& p = op_[r * n_ + c];
      if (p != 0 && rhs[c] != 0) acc += p * rhs[c];
    }
    x[r] = acc;
  }
  return x;
}

bool GroundedSolver::integral_solution(std::span<const std::int64_t> rhs) const {
  if (static_cast<int>(rhs.size()) != n_) throw Error(ErrorCode::InvalidArgument, "rhs length mismatch");
  if (scaled_fits_) {
    bool small = true;
    for (std::int64_t v : rhs) small = small && v > -(std::int64_t{1} << 20) && v < (std::int64_t{1} << 20);
    if (small) {
      __int128 c = 0;
      for (int k = 0; k < n_; ++k) c += static_cast<__int128>(consistency_scaled_[k]) * rhs[k];
      if (c != 0) return false;
      for (int r = 0; r < n_; ++r) {
        __int128 acc = 0;
        for (int k = 0; k < n_; ++k) acc += static_cast<__int128>(op_scaled_[r * n_ + k]) * rhs[k];
        if (acc % scale_ != 0) return false;
      }
      return true;
    }
  }
  RationalVector q(rhs.begin(), rhs.end());
  if (!consistent(q)) return false;
  const RationalVector x = solve(q);
  return std::all_of(x.begin(), x.end(), [](const Rational& v) { return is_integer(v); });
}

RationalVector grounded_solve(const LaplacianMatrix& L, std::span<const Rational> rhs, NodeId ground) {
  return GroundedSolver(L, ground).solve(rhs);
}

}  // namespace bcpg
