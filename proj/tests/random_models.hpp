#pragma once

// Random connected networks for property checks.

#include "bcpg/model.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace bcpg::testing {

/// Connected digraph on n nodes with weighted in-degree at most max_degree.
inline Digraph random_connected_digraph(std::mt19937_64& rng, int n, std::int64_t max_degree) {
  std::uniform_int_distribution<int> node(1, n);
  std::uniform_int_distribution<std::int64_t> weight(1, max_degree);
  std::uniform_int_distribution<int> extra(0, 2 * n);
  for (;;) {
    std::vector<std::int64_t> degree(n + 1, 0);
    std::vector<Edge> edges;
    auto try_add = [&](NodeId s, NodeId d) {
      if (s == d) return;
      for (const Edge& e : edges)
        if (e.src == s && e.dst == d) return;
      const std::int64_t room = max_degree - degree[d];
      if (room < 1) return;
      const std::int64_t w = std::min(room, weight(rng));
      edges.push_back({s, d, w});
      degree[d] += w;
    };
    // A random spanning in-tree keeps the graph connected; extra edges add cycles.
    std::vector<NodeId> order(n);
    for (int i = 0; i < n; ++i) order[i] = i + 1;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 1; k < n; ++k) try_add(order[std::uniform_int_distribution<int>(0, k - 1)(rng)], order[k]);
    const int m = extra(rng);
    for (int k = 0; k < m; ++k) try_add(node(rng), node(rng));
    Digraph g(n, edges);
    if (is_connected(g)) return g;
  }
}

inline NetworkModel random_model(std::mt19937_64& rng, int n, std::int64_t max_degree) {
  std::uniform_real_distribution<double> freq(-2.0, 2.0), bias(-std::numbers::pi, std::numbers::pi),
      gain(0.3, 3.0), offset(-1.0, 1.0);
  Digraph g = random_connected_digraph(rng, n, max_degree);
  std::vector<double> omega(n), phi(n);
  std::vector<BarrierFunction> f;
  for (int i = 0; i < n; ++i) {
    omega[i] = freq(rng);
    phi[i] = bias(rng);
    f.push_back(BarrierFunction::tan_half(gain(rng), offset(rng)));
  }
  return NetworkModel(std::move(g), omega, phi, f);
}

}  // namespace bcpg::testing
