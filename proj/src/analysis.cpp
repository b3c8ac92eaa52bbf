#include "bcpg/analysis.hpp"

#include "bcpg/error.hpp"
#include "bcpg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace bcpg {

namespace {

constexpr double kPi = std::numbers::pi;

void require_length(const NetworkModel& m, const SequenceIndex& n) {
  if (static_cast<int>(n.size()) != m.size()) throw Error(ErrorCode::InvalidArgument, "sequence length mismatch");
}

std::int64_t weighted_sum(const NetworkModel& m, const SequenceIndex& n) {
  std::int64_t s = 0;
  for (NodeId i : m.zeta().iscc_nodes) s += m.zeta().at(i) * n[i - 1];
  return s;
}

bool in_box(const NetworkModel& m, const SequenceIndex& n) {
  for (NodeId i = 1; i <= m.size(); ++i)
    if (std::abs(n[i - 1]) > m.graph().in_degree(i)) return false;
  return true;
}

// Saturated couplings must reach omega_bar - omega_i at every node.
void check_realizable(const NetworkModel& m, double omega_bar) {
  for (NodeId i = 1; i <= m.size(); ++i) {
    const auto [lo, hi] = m.f(i).range();
    const double y = omega_bar - m.omega(i);
    if (!(y > lo && y < hi))
      throw Error(ErrorCode::SaturationEscape, "node " + std::to_string(i) + " cannot produce " + std::to_string(y));
  }
}

}  // namespace

bool admissible_extended(const NetworkModel& m, const SequenceIndex& n) {
  require_length(m, n);
  if (!in_box(m, n)) return false;
  Rational q = 0;
  for (NodeId i : m.zeta().iscc_nodes) q += Rational(m.zeta().at(i)) * (Rational(2 * n[i - 1]) - m.phi_over_pi()[i - 1]);
  const Rational bound(m.zeta().total());
  return -bound < q && q < bound;
}

bool admissible_torus(const NetworkModel& m, const SequenceIndex& n, double eps) {
  if (!(eps >= 0 && eps < 1)) throw Error(ErrorCode::InvalidArgument, "eps must lie in [0, 1)");
  if (!admissible_extended(m, n)) return false;
  const int N = m.size();
  // Work in units of pi: y = theta / pi.
  const Rational e = rationalize(eps / kPi, 1e-15);
  LinearSystem sys;
  sys.variables = N;
  sys.lower.assign(N, Rational(-1) + e);
  sys.upper.assign(N, Rational(1) - e);
  for (NodeId i = 1; i <= N; ++i) {
    RationalVector row(N, Rational(0));
    for (const Edge& edge : m.graph().in_edges(i)) {
      row[edge.src - 1] += edge.weight;
      row[i - 1] -= edge.weight;
    }
    const Rational shift = m.phi_over_pi()[i - 1] - Rational(2 * n[i - 1]);
    // row.y + shift <= 1 - e and -(row.y + shift) <= 1 - e.
    sys.rows.push_back(row);
    sys.rhs.push_back(Rational(1) - e - shift);
    for (Rational& v : row) v = -v;
    sys.rows.push_back(row);
    sys.rhs.push_back(Rational(1) - e + shift);
  }
  return find_feasible_point(sys).has_value();
}

namespace {

// sum_{i in S} zeta_i (2 n_i pi - phi_i). It depends on n only through n_S,
// so every member of a class sees the same rounding.
long double weighted_offset(const NetworkModel& m, const SequenceIndex& n) {
  std::int64_t ns = 0;
  long double bias = 0;
  for (NodeId i : m.zeta().iscc_nodes) {
    ns += m.zeta().at(i) * n[i - 1];
    bias += m.zeta().at(i) * static_cast<long double>(m.phi(i));
  }
  return 2.0L * std::numbers::pi_v<long double> * ns - bias;
}

long double weighted_inverse(const NetworkModel& m, double omega_bar) {
  long double acc = 0;
  for (NodeId i : m.zeta().iscc_nodes)
    acc += m.zeta().at(i) * static_cast<long double>(m.f(i).inverse_clamped(omega_bar - m.omega(i)));
  return acc;
}

}  // namespace

double frequency_residual(const NetworkModel& m, const SequenceIndex& n, double omega_bar) {
  require_length(m, n);
  return static_cast<double>(weighted_inverse(m, omega_bar) + weighted_offset(m, n));
}

double solve_common_frequency(const NetworkModel& m, const SequenceIndex& n) {
  require_length(m, n);
  if (!admissible_extended(m, n)) throw Error(ErrorCode::NoSolution, "sequence is not admissible");
  double center = 0.0;
  for (NodeId i : m.zeta().iscc_nodes) center += static_cast<double>(m.zeta().at(i)) * m.omega(i);
  center /= static_cast<double>(m.zeta().total());

  auto F = [&](double w) { return frequency_residual(m, n, w); };
  double lo = center - 1.0, hi = center + 1.0;
  double width = 1.0;
  const double cap = std::ldexp(1.0, 60);
  while (F(lo) > 0) {
    width *= 2;
    if (width > cap) throw Error(ErrorCode::NoSolution, "frequency bracket did not close below");
    lo = center - width;
  }
  width = 1.0;
  while (F(hi) < 0) {
    width *= 2;
    if (width > cap) throw Error(ErrorCode::NoSolution, "frequency bracket did not close above");
    hi = center + width;
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = F(mid);
    if (v == 0) {
      lo = hi = mid;
      break;
    }
    if (v < 0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = std::abs(F(lo)) <= std::abs(F(hi)) ? lo : hi;
  if (m.any_saturated()) check_realizable(m, root);
  return root;
}

CentralPattern solve_formation(const NetworkModel& m, const SequenceIndex& n, double omega_bar) {
  require_length(m, n);
  const int N = m.size();
  if (m.any_saturated()) check_realizable(m, omega_bar);
  std::vector<long double> rhs(N);
  auto build_rhs = [&](double w) {
    for (NodeId i = 1; i <= N; ++i)
      rhs[i - 1] = static_cast<long double>(m.f(i).inverse(w - m.omega(i))) +
                   2.0L * std::numbers::pi_v<long double> * n[i - 1] - static_cast<long double>(m.phi(i));
  };
  const long double offset = weighted_offset(m, n);
  auto zeta_component = [&] {
    long double c = 0;
    for (NodeId i : m.zeta().iscc_nodes) c += m.zeta().at(i) * rhs[i - 1];
    return c;
  };
  build_rhs(omega_bar);
  long double c = weighted_inverse(m, omega_bar) + offset;
  if (std::abs(static_cast<double>(c)) > 1e-9)
    throw Error(ErrorCode::Inconsistent, "frequency residual " + std::to_string(static_cast<double>(c)));
  // Newton polish of omega_bar: dF/dw = sum zeta_i / f_i'(s_i). Pushing the
  // leftover into omega_bar keeps steep couplings from amplifying it.
  for (int iter = 0; iter < 3 && c != 0; ++iter) {
    long double slope = 0;
    for (NodeId i : m.zeta().iscc_nodes) {
      const double s = m.f(i).inverse(omega_bar - m.omega(i));
      slope += m.zeta().at(i) / static_cast<long double>(m.f(i).derivative(s));
    }
    if (!(slope > 0)) break;
    const double next = static_cast<double>(omega_bar - c / slope);
    if (next == omega_bar) break;
    if (m.any_saturated()) check_realizable(m, next);
    const long double c_next = weighted_inverse(m, next) + offset;
    if (std::abs(c_next) >= std::abs(c)) break;
    omega_bar = next;
    c = c_next;
  }
  build_rhs(omega_bar);
  c = zeta_component();
  // Remove what is left of the zeta-component.
  long double zz = 0;
  for (NodeId i : m.zeta().iscc_nodes) zz += static_cast<long double>(m.zeta().at(i)) * m.zeta().at(i);
  for (NodeId i : m.zeta().iscc_nodes) rhs[i - 1] -= c * m.zeta().at(i) / zz;

  CentralPattern p;
  p.omega_bar = omega_bar;
  p.sequence = n;
  p.delta.assign(N, 0.0);
  const auto& op = m.solver().solution_operator();
  for (int r = 0; r < N; ++r) {
    long double acc = 0;
    for (int k = 0; k < N; ++k) {
      const Rational& q = op[r * N + k];
      if (q != 0) acc += static_cast<long double>(q.get_d()) * rhs[k];
    }
    p.delta[r] = static_cast<double>(acc);
  }
  p.delta[0] = 0.0;
  for (const Edge& e : m.graph().edges()) p.delta_edges.push_back(reduce_angle(p.delta[e.src - 1] - p.delta[e.dst - 1]));

  double residual = 0.0;
  std::size_t k = 0;
  std::vector<double> arg(N, 0.0);
  for (const Edge& e : m.graph().edges()) arg[e.dst - 1] += static_cast<double>(e.weight) * p.delta_edges[k++];
  for (NodeId i = 1; i <= N; ++i)
    residual = std::max(residual, std::abs(omega_bar - m.omega(i) - m.f(i).eval(arg[i - 1] + m.phi(i))));
  p.residual = residual;
  return p;
}

CentralPattern solve_pattern(const NetworkModel& m, const SequenceIndex& n) {
  return solve_formation(m, n, solve_common_frequency(m, n));
}

bool equivalent(const NetworkModel& m, const SequenceIndex& n1, const SequenceIndex& n2) {
  require_length(m, n1);
  require_length(m, n2);
  if (weighted_sum(m, n1) != weighted_sum(m, n2)) return false;
  std::vector<std::int64_t> diff(n1.size());
  for (std::size_t i = 0; i < n1.size(); ++i) diff[i] = n1[i] - n2[i];
  return m.solver().integral_solution(diff);
}

SequenceIndex iscc_projection(const NetworkModel& m, const SequenceIndex& n) {
  require_length(m, n);
  SequenceIndex p;
  for (NodeId i : m.zeta().iscc_nodes) p.push_back(n[i - 1]);
  return p;
}

bool followers_are_unit_chains(const NetworkModel& m) {
  const auto& s = m.zeta().iscc_nodes;
  for (NodeId i = 1; i <= m.size(); ++i) {
    if (std::binary_search(s.begin(), s.end(), i)) continue;
    const auto in = m.graph().in_edges(i);
    if (in.size() != 1 || in[0].weight != 1) return false;
  }
  return true;
}

std::size_t PartitionAtlas::n_realizable() const {
  return static_cast<std::size_t>(
      std::count_if(classes.begin(), classes.end(), [](const PatternClass& c) { return c.pattern.has_value(); }));
}

int PartitionAtlas::class_of(const NetworkModel& m, const SequenceIndex& n) const {
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (equivalent(m, classes[c].id, n)) return static_cast<int>(c);
  return -1;
}

PartitionAtlas enumerate_classes(const NetworkModel& m, const EnumerationOptions& options) {
  const int N = m.size();
  const auto d = degree_bounds(m);
  std::uint64_t total = 1;
  for (std::int64_t di : d) {
    const auto span = static_cast<std::uint64_t>(2 * di + 1);
    if (total > options.budget / span + 1) throw Error(ErrorCode::BudgetExceeded, "candidate box is too large");
    total *= span;
  }
  if (total > options.budget)
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(total) + " candidates exceed the budget of " + std::to_string(options.budget));

  const NsInterval window = ns_interval(m);
  const auto& s_nodes = m.zeta().iscc_nodes;
  const bool fast = followers_are_unit_chains(m);

  // Equivalence on the coordinates that matter: all of them, or only the iSCC.
  std::optional<NetworkModel> reduced;
  if (fast) {
    const Digraph gs = induced_subgraph(m.graph(), s_nodes);
    std::vector<double> om, ph;
    std::vector<BarrierFunction> fs;
    for (NodeId i : s_nodes) {
      om.push_back(m.omega(i));
      ph.push_back(m.phi(i));
      fs.push_back(m.f(i));
    }
    reduced.emplace(gs, om, ph, fs);
  }
  const NetworkModel& key_model = fast ? *reduced : m;
  auto key_of = [&](const SequenceIndex& n) { return fast ? iscc_projection(m, n) : n; };

  PartitionAtlas atlas;
  atlas.candidates = total;
  // Class representatives bucketed by n_S.
  std::map<std::int64_t, std::vector<std::size_t>> buckets;
  std::map<SequenceIndex, std::size_t> key_class;
  std::vector<SequenceIndex> class_key;

  SequenceIndex n(N);
  for (int i = 0; i < N; ++i) n[i] = -d[i];
  for (;;) {
    const std::int64_t ns = weighted_sum(m, n);
    if (ns >= window.first && ns <= window.last) {
      const std::size_t index = atlas.admissible.size();
      atlas.admissible.push_back(n);
      SequenceIndex key = key_of(n);
      std::size_t cls;
      if (auto it = key_class.find(key); it != key_class.end()) {
        cls = it->second;
      } else {
        cls = atlas.classes.size();
        auto& bucket = buckets[ns];
        for (std::size_t c : bucket) {
          if (equivalent(key_model, class_key[c], key)) {
            cls = c;
            break;
          }
        }
        if (cls == atlas.classes.size()) {
          bucket.push_back(cls);
          class_key.push_back(key);
          atlas.classes.push_back(PatternClass{n, {}, std::nullopt, {}});
        }
        if (fast) key_class.emplace(std::move(key), cls);
      }
      atlas.classes[cls].members.push_back(index);
    }
    int pos = N - 1;
    while (pos >= 0 && n[pos] == d[pos]) {
      n[pos] = -d[pos];
      --pos;
    }
    if (pos < 0) break;
    ++n[pos];
  }

  for (PatternClass& c : atlas.classes) {
    try {
      CentralPattern p = solve_pattern(m, c.id);
      p.class_id = c.id;
      c.pattern = std::move(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SaturationEscape && e.code() != ErrorCode::OutOfRange) throw;
      c.unrealizable_reason = e.what();
    }
  }
  return atlas;
}

NsInterval ns_interval(const NetworkModel& m) {
  NsInterval r;
  r.zeta_total = m.zeta().total();
  Rational phi_s = 0;  // phi_S / pi
  for (NodeId i : m.zeta().iscc_nodes) phi_s += Rational(m.zeta().at(i)) * m.phi_over_pi()[i - 1];
  r.lower = (phi_s - Rational(r.zeta_total)) / 2;
  r.upper = (phi_s + Rational(r.zeta_total)) / 2;
  r.lower.canonicalize();
  r.upper.canonicalize();
  BigInt fl, cl;
  mpz_fdiv_q(fl.get_mpz_t(), r.lower.get_num_mpz_t(), r.lower.get_den_mpz_t());
  mpz_cdiv_q(cl.get_mpz_t(), r.upper.get_num_mpz_t(), r.upper.get_den_mpz_t());
  r.first = to_int64(fl) + 1;
  r.last = to_int64(cl) - 1;
  r.count = std::max<std::int64_t>(0, r.last - r.first + 1);
  return r;
}

}  // namespace bcpg
