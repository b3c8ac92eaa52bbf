#include "bcpg/design.hpp"

#include "bcpg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

namespace bcpg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSignZero = 1e-12;

int sign_of(double v) { return v > kSignZero ? 1 : (v < -kSignZero ? -1 : 0); }

void require_target(const Digraph& g, const TargetPattern& t) {
  if (static_cast<int>(t.delta.size()) != g.node_count())
    throw Error(ErrorCode::InvalidArgument, "target needs one phase per node");
  if (!std::isfinite(t.omega_bar)) throw Error(ErrorCode::InvalidArgument, "target frequency must be finite");
}

void require_sizes(const Digraph& g, std::size_t a, std::size_t b) {
  const auto n = static_cast<std::size_t>(g.node_count());
  if (a != n || b != n) throw Error(ErrorCode::InvalidArgument, "per-node vectors must have one entry per node");
}

DesignSolution certify(std::string mode, NetworkModel model, const TargetPattern& target) {
  auto residuals = pattern_residuals(model, target);
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::abs(r));
  return DesignSolution{std::move(mode), std::move(model), std::move(residuals), worst, {}};
}

// Pole-safe sign of prototype at an argument.
std::optional<int> prototype_sign(const BarrierFunction& f, double arg) {
  const double r = reduce_angle(arg);
  if (!f.is_saturated() && (r < -kPi + kPoleGuard || r > kPi - kPoleGuard)) return std::nullopt;
  return sign_of(f.eval(r));
}

// Adds pool edges until every node of `universe` is reachable from `roots`.
void complete_reachability(int n, const std::vector<Edge>& pool, std::vector<Edge>& h, const NodeSet& universe,
                           const NodeSet& roots) {
  std::vector<bool> inside(n + 1, false);
  for (NodeId v : universe) inside[v] = true;
  auto has = [&](const Edge& e) {
    return std::any_of(h.begin(), h.end(), [&](const Edge& x) { return x.src == e.src && x.dst == e.dst; });
  };
  for (;;) {
    std::vector<Edge> local;
    for (const Edge& e : h)
      if (inside[e.src] && inside[e.dst]) local.push_back(e);
    const Digraph hg(n, local);
    const NodeSet reached = reachable_from(hg, roots);
    std::vector<bool> is_reached(n + 1, false);
    for (NodeId v : reached) is_reached[v] = true;
    if (std::all_of(universe.begin(), universe.end(), [&](NodeId v) { return is_reached[v]; })) return;

    std::vector<bool> in_iscc(n + 1, false);
    for (const NodeSet& c : independent_sccs(hg))
      for (NodeId v : c) in_iscc[v] = true;
    const Edge* pick = nullptr;
    for (int pass = 0; pass < 2 && pick == nullptr; ++pass) {
      for (const Edge& e : pool) {
        if (!inside[e.src] || !inside[e.dst] || !is_reached[e.src] || is_reached[e.dst] || has(e)) continue;
        if (pass == 0 && !in_iscc[e.dst]) continue;
        pick = &e;
        break;
      }
    }
    if (pick == nullptr) throw Error(ErrorCode::NotConnected, "edge pool cannot reach every node");
    h.push_back(*pick);
  }
}

}  // namespace

std::vector<double> edge_differences(const Digraph& g, const TargetPattern& target) {
  require_target(g, target);
  std::vector<double> out;
  for (const Edge& e : g.edges()) out.push_back(reduce_angle(target.delta[e.src - 1] - target.delta[e.dst - 1]));
  return out;
}

std::vector<double> target_arguments(const Digraph& g, const std::vector<double>& phi, const TargetPattern& target) {
  require_target(g, target);
  if (static_cast<int>(phi.size()) != g.node_count()) throw Error(ErrorCode::InvalidArgument, "phi length mismatch");
  const auto d = edge_differences(g, target);
  std::vector<double> arg(phi);
  std::size_t k = 0;
  for (const Edge& e : g.edges()) arg[e.dst - 1] += static_cast<double>(e.weight) * d[k++];
  for (double& a : arg) a = reduce_angle(a);
  return arg;
}

std::vector<double> pattern_residuals(const NetworkModel& m, const TargetPattern& target) {
  const auto arg = target_arguments(m.graph(), m.phi(), target);
  std::vector<double> r(m.size());
  for (NodeId i = 1; i <= m.size(); ++i) r[i - 1] = target.omega_bar - m.omega(i) - m.f(i).eval(arg[i - 1]);
  return r;
}

DesignSolution assign_by_phase_bias(const Digraph& g, const std::vector<double>& omega,
                                    const std::vector<BarrierFunction>& f, const TargetPattern& target) {
  require_target(g, target);
  require_sizes(g, omega.size(), f.size());
  const std::vector<double> zero(g.node_count(), 0.0);
  const auto sums = target_arguments(g, zero, target);
  std::vector<double> phi(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    if (f[i].is_saturated()) throw Error(ErrorCode::InvalidArgument, "phase-bias design needs barrier couplings");
    phi[i] = reduce_angle(f[i].inverse(target.omega_bar - omega[i]) - sums[i]);
  }
  return certify("phase_bias", NetworkModel(g, omega, phi, f), target);
}

DesignSolution assign_by_gains(const Digraph& g, const std::vector<double>& omega, const std::vector<double>& phi,
                               const BarrierFunction& prototype, const TargetPattern& target) {
  require_target(g, target);
  require_sizes(g, omega.size(), phi.size());
  const auto arg = target_arguments(g, phi, target);
  std::vector<BarrierFunction> f;
  std::vector<int> bad;
  for (int i = 0; i < g.node_count(); ++i) {
    const double want = target.omega_bar - omega[i];
    const auto have = prototype_sign(prototype, arg[i]);
    if (!have || *have != sign_of(want)) {
      bad.push_back(i + 1);
      continue;
    }
    const double gain = sign_of(want) == 0 ? 1.0 : want / prototype.eval(arg[i]);
    f.push_back(BarrierFunction::scaled(gain, prototype));
  }
  if (!bad.empty()) {
    std::string list;
    for (int i : bad) list += (list.empty() ? "" : ", ") + std::to_string(i);
    throw Error(ErrorCode::SignMismatch, "sign condition fails at nodes " + list);
  }
  return certify("gains", NetworkModel(g, omega, phi, std::move(f)), target);
}

std::optional<std::int64_t> search_weights_for_sign(double delta_ij, double rest, const BarrierFunction& prototype,
                                                    int target_sign, std::int64_t max_alpha) {
  if (target_sign == 0) throw Error(ErrorCode::InvalidArgument, "target sign must be nonzero");
  if (max_alpha < 1) throw Error(ErrorCode::InvalidArgument, "max_alpha must be at least 1");
  for (std::int64_t a = 1; a <= max_alpha; ++a) {
    // Reduce the product first so large alpha keeps full precision in the argument.
    const double arg = reduce_angle(std::fmod(static_cast<double>(a) * delta_ij, 2 * kPi) + rest);
    if (prototype_sign(prototype, arg) == target_sign) return a;
  }
  return std::nullopt;
}

std::optional<std::int64_t> search_ratio_for_sign(const std::vector<std::int64_t>& ratios,
                                                  const std::vector<double>& deltas, double phi_i,
                                                  const BarrierFunction& prototype, int target_sign,
                                                  std::int64_t max_beta) {
  if (ratios.size() != deltas.size() || ratios.empty())
    throw Error(ErrorCode::InvalidArgument, "ratios and deltas must be nonempty and aligned");
  double base = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (ratios[k] < 1) throw Error(ErrorCode::InvalidArgument, "ratios must be positive integers");
    base += static_cast<double>(ratios[k]) * deltas[k];
  }
  return search_weights_for_sign(base, phi_i, prototype, target_sign, max_beta);
}

std::vector<Edge> irrational_edges(const Digraph& g, const TargetPattern& target, int max_den, double tol) {
  require_target(g, target);
  std::vector<Edge> out;
  for (const Edge& e : g.edges()) {
    const double x = (target.delta[e.src - 1] - target.delta[e.dst - 1]) / (2 * kPi);
    bool rational = false;
    for (int q = 1; q <= max_den && !rational; ++q) rational = std::abs(x - std::round(x * q) / q) <= tol;
    if (!rational) out.push_back(e);
  }
  return out;
}

Digraph minimal_edge_subgraph(const Digraph& g, const std::vector<Edge>& required) {
  const auto isccs = independent_sccs(g);
  if (isccs.size() != 1) throw Error(ErrorCode::NotConnected, "graph must be connected");
  const NodeSet& s = isccs.front();
  std::vector<Edge> h;
  for (const Edge& r : required) {
    const std::int64_t w = g.weight(r.src, r.dst);
    if (w == 0) throw Error(ErrorCode::InvalidArgument, "required edge " + std::to_string(r.src) + "->" +
                                                            std::to_string(r.dst) + " is not in the graph");
    if (std::none_of(h.begin(), h.end(), [&](const Edge& x) { return x.src == r.src && x.dst == r.dst; }))
      h.push_back({r.src, r.dst, w});
  }
  const int n = g.node_count();
  const std::vector<Edge> pool(g.edges().begin(), g.edges().end());

  // Stage one: inside the iSCC, rooted at the component of its smallest node.
  std::vector<bool> in_s(n + 1, false);
  for (NodeId v : s) in_s[v] = true;
  std::vector<Edge> inner;
  for (const Edge& e : h)
    if (in_s[e.src] && in_s[e.dst]) inner.push_back(e);
  NodeSet roots;
  for (const NodeSet& c : strongly_connected_components(Digraph(n, inner)))
    if (std::find(c.begin(), c.end(), s.front()) != c.end()) roots = c;
  complete_reachability(n, pool, h, s, roots);

  // Stage two: everything else, from the same root.
  NodeSet all(n);
  std::iota(all.begin(), all.end(), 1);
  complete_reachability(n, pool, h, all, roots);
  return Digraph(n, std::move(h));
}

DesignSolution design_weights(const Digraph& g, const std::vector<double>& omega, const std::vector<double>& phi,
                              const BarrierFunction& prototype, const TargetPattern& target,
                              std::optional<std::vector<Edge>> candidates, std::int64_t max_alpha) {
  require_target(g, target);
  require_sizes(g, omega.size(), phi.size());
  const std::vector<Edge> preferred = candidates ? *candidates : irrational_edges(g, target);
  const Digraph h = minimal_edge_subgraph(g, preferred);
  auto is_preferred = [&](const Edge& e) {
    return std::any_of(preferred.begin(), preferred.end(),
                       [&](const Edge& p) { return p.src == e.src && p.dst == e.dst; });
  };
  auto diff = [&](const Edge& e) { return reduce_angle(target.delta[e.src - 1] - target.delta[e.dst - 1]); };

  std::vector<Edge> chosen;
  std::vector<std::string> notes;
  for (NodeId i = 1; i <= g.node_count(); ++i) {
    const int want = sign_of(target.omega_bar - omega[i - 1]);
    std::vector<Edge> in(h.in_edges(i).begin(), h.in_edges(i).end());
    for (Edge& e : in) e.weight = 1;
    double arg = phi[i - 1];
    for (const Edge& e : in) arg += diff(e);
    if (want == 0 || prototype_sign(prototype, arg) == want) {
      chosen.insert(chosen.end(), in.begin(), in.end());
      continue;
    }
    // Raise one weight, preferred edges first, then smallest alpha.
    std::optional<std::pair<std::int64_t, std::size_t>> best;
    std::vector<std::size_t> order(in.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return is_preferred(in[k]); });
    for (std::size_t k : order) {
      const auto a = search_weights_for_sign(diff(in[k]), arg - diff(in[k]), prototype, want, max_alpha);
      if (a && (!best || *a < best->first)) best = std::pair{*a, k};
    }
    if (best) {
      in[best->second].weight = best->first;
      chosen.insert(chosen.end(), in.begin(), in.end());
      continue;
    }
    // Otherwise bring in one more edge of g, as done for a tree root.
    std::optional<Edge> extra;
    for (int pass = 0; pass < 2 && !extra; ++pass) {
      for (const Edge& e : g.in_edges(i)) {
        if (h.has_edge(e.src, i) || (pass == 0 && !is_preferred(e))) continue;
        if (auto a = search_weights_for_sign(diff(e), arg, prototype, want, max_alpha)) {
          if (!extra || *a < extra->weight) extra = Edge{e.src, i, *a};
        }
      }
    }
    if (!extra)
      throw Error(ErrorCode::BoundExhausted,
                  "no weight up to " + std::to_string(max_alpha) + " fixes the sign at node " + std::to_string(i));
    notes.push_back("added edge " + std::to_string(extra->src) + "->" + std::to_string(i) + " with weight " +
                    std::to_string(extra->weight));
    chosen.insert(chosen.end(), in.begin(), in.end());
    chosen.push_back(*extra);
  }
  DesignSolution sol = assign_by_gains(Digraph(g.node_count(), chosen), omega, phi, prototype, target);
  sol.mode = "weights";
  sol.notes = std::move(notes);
  return sol;
}

MultiPatternCheck multi_pattern_feasible(const Digraph& g, const std::vector<double>& phi,
                                         const std::vector<TargetPattern>& patterns) {
  MultiPatternCheck out;
  if (patterns.empty()) throw Error(ErrorCode::InvalidArgument, "no patterns given");
  for (const auto& p : patterns) out.theta.push_back(target_arguments(g, phi, p));
  out.order.resize(patterns.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return patterns[a].omega_bar < patterns[b].omega_bar; });
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    for (int i = 0; i < g.node_count(); ++i) {
      const double t = out.theta[k][i];
      if (t < -kPi + kPoleGuard || t > kPi - kPoleGuard) {
        out.reason = "pattern " + std::to_string(k) + " puts node " + std::to_string(i + 1) + " on a pole";
        return out;
      }
    }
  }
  for (std::size_t k = 0; k + 1 < out.order.size(); ++k) {
    const std::size_t a = out.order[k], b = out.order[k + 1];
    const bool tie = std::abs(patterns[b].omega_bar - patterns[a].omega_bar) <= 1e-12;
    for (int i = 0; i < g.node_count(); ++i) {
      const double ta = out.theta[a][i], tb = out.theta[b][i];
      const bool ok = tie ? std::abs(tb - ta) <= 1e-10 : tb - ta > 1e-10;
      if (!ok) {
        out.reason = "node " + std::to_string(i + 1) + (tie ? " separates tied patterns " : " reverses patterns ") +
                     std::to_string(a) + " and " + std::to_string(b);
        return out;
      }
    }
  }
  out.feasible = true;
  return out;
}

std::vector<BarrierFunction> construct_multi_pattern_couplings(const Digraph& g, const std::vector<double>& phi,
                                                               const std::vector<double>& omega,
                                                               const std::vector<TargetPattern>& patterns) {
  require_sizes(g, omega.size(), phi.size());
  const MultiPatternCheck check = multi_pattern_feasible(g, phi, patterns);
  if (!check.feasible) throw Error(ErrorCode::InfeasibleOrdering, check.reason);
  std::vector<BarrierFunction> out;
  for (int i = 0; i < g.node_count(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k : check.order) {
      const double s = check.theta[k][i], y = patterns[k].omega_bar - omega[i];
      if (pts.empty() || std::abs(s - pts.back().first) > 1e-10) pts.emplace_back(s, y);
    }
    if (pts.size() == 1) {
      const auto [s, y] = pts.front();
      const double t = std::tan(0.5 * s);
      if (sign_of(t) == sign_of(y) && sign_of(t) != 0)
        out.push_back(BarrierFunction::tan_half(y / t));
      else
        out.push_back(BarrierFunction::tan_half(1.0, y - t));
    } else if (pts.size() == 2) {
      const double t1 = std::tan(0.5 * pts[0].first), t2 = std::tan(0.5 * pts[1].first);
      const double a = (pts[1].second - pts[0].second) / (t2 - t1);
      out.push_back(BarrierFunction::tan_half(a, pts[0].second - a * t1));
    } else {
      out.push_back(BarrierFunction::monotone_piecewise(pts));
    }
  }
  return out;
}

SaturationReport saturate_for_uniqueness(const NetworkModel& m, const TargetPattern& keep, double margin,
                                         const EnumerationOptions& options) {
  if (!(margin > 0)) throw Error(ErrorCode::InvalidArgument, "margin must be positive");
  for (double r : pattern_residuals(m, keep))
    if (std::abs(r) > 1e-8) throw Error(ErrorCode::InvalidArgument, "kept pattern is not a central pattern of the model");

  SaturationReport out{m, keep.omega_bar, false, {}, {}, {}, 0};
  const int n = m.size();
  const ScaledPrototype* first = std::get_if<ScaledPrototype>(&m.f(1).variant());
  out.shared_prototype = first != nullptr;
  for (NodeId i = 2; out.shared_prototype && i <= n; ++i) {
    const auto* p = std::get_if<ScaledPrototype>(&m.f(i).variant());
    out.shared_prototype = p && *p->prototype == *first->prototype;
  }

  std::vector<BarrierFunction> f;
  if (out.shared_prototype) {
    const BarrierFunction& proto = *first->prototype;
    const auto theta = target_arguments(m.graph(), m.phi(), keep);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double t : theta) {
      lo = std::min(lo, proto.eval(t));
      hi = std::max(hi, proto.eval(t));
    }
    const BarrierFunction cut = saturate(proto, lo - margin, hi + margin, margin);
    out.bounds.emplace_back(lo - margin, hi + margin);
    for (NodeId i = 1; i <= n; ++i)
      f.push_back(BarrierFunction::scaled(std::get<ScaledPrototype>(m.f(i).variant()).g, cut));
  } else {
    for (NodeId i = 1; i <= n; ++i) {
      const double y = keep.omega_bar - m.omega(i);
      f.push_back(saturate(m.f(i), y - margin, y + margin, 0.1 * margin));
      out.bounds.emplace_back(y - margin, y + margin);
    }
  }

  const PartitionAtlas atlas = enumerate_classes(m, options);
  const auto keep_edges = edge_differences(m.graph(), keep);
  for (const PatternClass& c : atlas.classes) {
    if (!c.pattern) continue;
    const CentralPattern& p = *c.pattern;
    bool same = std::abs(p.omega_bar - keep.omega_bar) <= 1e-9;
    for (std::size_t k = 0; same && k < keep_edges.size(); ++k)
      same = std::abs(reduce_angle(p.delta_edges[k] - keep_edges[k])) <= 1e-8;
    if (same) continue;
    bool outside = false;
    for (NodeId i = 1; i <= n && !outside; ++i) {
      const auto [lo, hi] = f[i - 1].range();
      const double y = p.omega_bar - m.omega(i);
      outside = !(y > lo && y < hi);
    }
    (outside ? out.excluded : out.surviving).push_back(p.omega_bar);
  }
  if (out.excluded.empty() && !out.surviving.empty())
    throw Error(ErrorCode::CannotSeparate, "no alternative frequency leaves the saturated ranges");

  out.model = NetworkModel(m.graph(), m.omega(), m.phi(), std::move(f));
  out.realizable_classes = enumerate_classes(out.model, options).n_realizable();
  return out;
}

}  // namespace bcpg
