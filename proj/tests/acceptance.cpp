// Acceptance checks. `acceptance N` runs criterion N, `acceptance` runs all.
// Each criterion prints one PASS/FAIL line; the exit status is nonzero if any failed.

#include "bcpg/analysis.hpp"
#include "bcpg/error.hpp"
#include "bcpg/io.hpp"
#include "bcpg/reproduce.hpp"
#include "bcpg/scenarios.hpp"
#include "bcpg/simulation.hpp"
#include "random_models.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

using namespace bcpg;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string seq(const SequenceIndex& n) { return io::format_sequence(n); }

NetworkModel shipped_model(const char* file) {
  const io::Json j = io::read_json(std::filesystem::path(BCPG_SOURCE_DIR) / "scenarios" / file);
  return io::model_from_json(j["model"], true);
}

// Groups of iSCC projections, each group and the whole list sorted.
std::vector<std::vector<SequenceIndex>> projected_groups(const NetworkModel& m, const PartitionAtlas& atlas) {
  std::vector<std::vector<SequenceIndex>> out;
  for (const auto& c : atlas.classes) {
    std::set<SequenceIndex> g;
    for (std::size_t k : c.members) g.insert(iscc_projection(m, atlas.admissible[k]));
    out.emplace_back(g.begin(), g.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Independent plug-back of a pattern into the locking equations.
double plug_back(const NetworkModel& m, const CentralPattern& p) {
  std::vector<double> arg(m.size());
  for (NodeId i = 1; i <= m.size(); ++i) arg[i - 1] = m.phi(i);
  for (const Edge& e : m.graph().edges())
    arg[e.dst - 1] += static_cast<double>(e.weight) * (p.delta[e.src - 1] - p.delta[e.dst - 1]);
  double worst = 0;
  for (NodeId i = 1; i <= m.size(); ++i)
    worst = std::max(worst, std::abs(p.omega_bar - m.omega(i) - m.f(i).eval(arg[i - 1])));
  return worst;
}

double rounding_floor(const NetworkModel& m, const CentralPattern& p) {
  std::vector<double> arg(m.size());
  for (NodeId i = 1; i <= m.size(); ++i) arg[i - 1] = m.phi(i);
  for (const Edge& e : m.graph().edges())
    arg[e.dst - 1] += static_cast<double>(e.weight) * (p.delta[e.src - 1] - p.delta[e.dst - 1]);
  double worst = 0;
  for (NodeId i = 1; i <= m.size(); ++i)
    worst = std::max(worst, m.f(i).derivative(arg[i - 1]) * std::ldexp(std::max(1.0, std::abs(arg[i - 1])), -52));
  return worst;
}

double circ(double a, double b) { return std::abs(reduce_angle(a - b)); }

bool same_pattern(const CentralPattern& a, const CentralPattern& b) {
  if (std::abs(a.omega_bar - b.omega_bar) > 1e-9) return false;
  for (std::size_t i = 0; i < a.delta.size(); ++i)
    if (circ(a.delta[i], b.delta[i]) > 1e-8) return false;
  return true;
}

// The random family of criteria 9 and 10.
std::vector<NetworkModel> random_family(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 5);
  std::uniform_int_distribution<std::int64_t> degree(1, 3);
  std::vector<NetworkModel> out;
  for (int k = 0; k < count; ++k) {
    const int n = size(rng);
    out.push_back(testing::random_model(rng, n, degree(rng)));
  }
  return out;
}

Outcome nine_node_atlas() {
  const NetworkModel m = shipped_model("nine_node.json");
  const auto t0 = Clock::now();
  const PartitionAtlas atlas = enumerate_classes(m);
  const double secs = since(t0);
  std::set<SequenceIndex> pairs;
  for (const auto& n : atlas.admissible) pairs.insert(iscc_projection(m, n));
  const std::set<SequenceIndex> want_pairs{{-1, 2}, {0, 0}, {0, 1}, {0, 2}, {1, -2}, {1, -1}, {1, 0}};
  const std::vector<std::vector<SequenceIndex>> want_groups{
      {{-1, 2}, {0, 0}, {1, -2}}, {{0, 1}, {1, -1}}, {{0, 2}, {1, 0}}};
  const bool ok = pairs == want_pairs && atlas.n_patterns() == 3 && projected_groups(m, atlas) == want_groups &&
                  secs < 1.0;
  return {ok, fmt("%zu pairs, N^P = %zu, %.3f s", pairs.size(), atlas.n_patterns(), secs)};
}

Outcome phase_bias_atlas() {
  const NetworkModel m = shipped_model("nine_node_phase_bias.json");
  const auto t0 = Clock::now();
  const PartitionAtlas atlas = enumerate_classes(m);
  const double secs = since(t0);
  const bool ok = atlas.n_patterns() == 1 && m.phi(1) == 1.0 / 25 && m.phi(2) == -1.0 / 25 &&
                  m.graph().weight(1, 2) == 1 && secs < 1.0;
  return {ok, fmt("N^P = %zu, %.3f s", atlas.n_patterns(), secs)};
}

reproduce::Options quiet() {
  reproduce::Options o;
  o.write_files = false;
  return o;
}

Outcome figure3() {
  const auto t0 = Clock::now();
  const auto fig = reproduce::run("fig3", quiet());
  const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::Gains);
  const PartitionAtlas atlas = enumerate_classes(m);
  // Classes are named by a member's (n_1, n_2); followers stay at zero.
  const std::vector<SequenceIndex> want{{0, 1}, {0, 0}, {1, 0}};
  bool ok = fig.runs.size() == 3;
  std::string detail;
  double werr = 0, derr = 0;
  for (std::size_t k = 0; ok && k < 3; ++k) {
    const auto& r = fig.runs[k];
    SequenceIndex full(9, 0);
    full[0] = want[k][0];
    full[1] = want[k][1];
    const int expected = atlas.class_of(m, full);
    const bool good = r.detected.converged && r.class_id && expected >= 0 &&
                      *r.class_id == atlas.classes[expected].id && r.omega_error < 1e-6 && r.delta_error < 1e-5;
    ok = ok && good;
    werr = std::max(werr, r.omega_error);
    derr = std::max(derr, r.delta_error);
    detail += fmt("%s%s%s", k ? " " : "", seq(want[k]).c_str(), good ? "" : "(miss)");
  }
  const double secs = since(t0);
  ok = ok && secs < 30;
  return {ok, fmt("classes %s, errors %.1e / %.1e, %.2f s", detail.c_str(), werr, derr, secs)};
}

Outcome figure4b() {
  const auto t0 = Clock::now();
  const auto fig = reproduce::run("fig4b", quiet());
  const NetworkModel m = scenarios::nine_node_model(scenarios::NineNodeVariant::Saturated);
  const PartitionAtlas atlas = enumerate_classes(m);
  const int target = atlas.class_of(m, {0, 1, 0, 0, 0, 0, 0, 0, 0});
  bool ok = atlas.n_realizable() == 1 && target >= 0 && fig.runs.size() == 3;
  std::string detail;
  for (const auto& r : fig.runs) {
    ok = ok && r.detected.converged && r.class_id && *r.class_id == atlas.classes[target].id;
    detail += (detail.empty() ? "" : " ") + (r.class_id ? seq(iscc_projection(m, *r.class_id)) : std::string("none"));
  }
  const double secs = since(t0);
  ok = ok && secs < 30;
  return {ok, fmt("realizable %zu, runs %s, %.2f s", atlas.n_realizable(), detail.c_str(), secs)};
}

Outcome figure5() {
  const auto t0 = Clock::now();
  const auto fig = reproduce::run("fig5", quiet());
  // Runs: the two initial conditions without kicks, then both with the train.
  const auto& plain = fig.runs.at(0).detected;
  const auto& kicked = fig.runs.at(2).detected;
  const double eps = 0.1;
  const bool a = plain.converged && std::abs(plain.omega_bar_est - 2) < 1e-4 &&
                 circ(plain.delta_est[1], kPi / 2 - eps) < 1e-3;
  const bool b = kicked.converged && std::abs(kicked.omega_bar_est - 1) < 1e-4 && circ(kicked.delta_est[1], kPi) < 1e-3;
  const double secs = since(t0);
  return {a && b && secs < 20,
          fmt("no kicks (%.6f, %.6f), kicked (%.6f, %.6f), %zu kicks, %.2f s", plain.omega_bar_est,
              plain.delta_est[1], kicked.omega_bar_est, kicked.delta_est[1], fig.runs[2].trajectory.events.size(),
              secs)};
}

Outcome figure6() {
  const auto t0 = Clock::now();
  const auto fig = reproduce::run("fig6", quiet());
  const auto patterns = scenarios::three_ring_patterns();
  bool ok = fig.runs.size() == 2;
  std::string detail;
  for (std::size_t k = 0; ok && k < 2; ++k) {
    const auto& d = fig.runs[k].detected;
    const double werr = std::abs(d.omega_bar_est - patterns[k].omega_bar);
    const double derr = reproduce::max_angle_error(d.delta_est, patterns[k].delta);
    ok = ok && d.converged && werr < 1e-6 && derr < 1e-5;
    detail += fmt("%s%.6f (%.1e)", k ? ", " : "", d.omega_bar_est, derr);
  }
  const double secs = since(t0);
  return {ok && secs < 20, fmt("omega_bar %s, %.2f s", detail.c_str(), secs)};
}

Outcome figure7() {
  const auto t0 = Clock::now();
  const auto fig = reproduce::run("fig7", quiet());
  const int n = 9;
  std::vector<double> splay(n), sync(n, 0.0);
  for (int i = 0; i < n; ++i) splay[i] = 2.0 * i * kPi / n;
  bool got_splay = false, got_sync = false;
  std::string detail;
  for (const auto& r : fig.runs) {
    const auto& d = r.detected;
    if (!d.converged) continue;
    if (std::abs(d.omega_bar_est) < 1e-6 && reproduce::max_angle_error(d.delta_est, splay) < 1e-5) got_splay = true;
    if (std::abs(d.omega_bar_est - 1) < 1e-6 && reproduce::max_angle_error(d.delta_est, sync) < 1e-5) got_sync = true;
    detail += fmt("%s%.7f", detail.empty() ? "" : ", ", d.omega_bar_est);
  }
  const double secs = since(t0);
  return {got_splay && got_sync && fig.runs.size() == 2 && secs < 30,
          fmt("omega_bar %s, %.2f s", detail.c_str(), secs)};
}

Outcome ring_counting() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> bias(-kPi, kPi);
  bool ok = true;
  std::string detail;
  for (int n : {3, 4, 5}) {
    int generic_bad = 0;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> phi(n);
      for (double& p : phi) p = bias(rng);
      double total = std::accumulate(phi.begin(), phi.end(), 0.0);
      if (std::abs(reduce_angle(total + kPi)) < 1e-6) continue;
      const NetworkModel m = scenarios::ring_model(n, phi, std::vector<double>(n, 0.0));
      if (enumerate_classes(m).n_patterns() != static_cast<std::size_t>(n)) ++generic_bad;
    }
    // phi_S = -pi: biases are multiples of pi/16 so the sum is exact, and
    // the last one closes it.
    std::uniform_int_distribution<int> step(-8, 7);
    std::vector<int> k(n);
    int total16 = -16;
    for (int i = 0; i + 1 < n; ++i) {
      k[i] = step(rng);
      total16 -= k[i];
    }
    k[n - 1] = ((total16 + 16) % 32 + 32) % 32 - 16;
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) phi[i] = k[i] * kPi / 16;
    const NetworkModel m = scenarios::ring_model(n, phi, std::vector<double>(n, 0.0));
    const std::size_t special = enumerate_classes(m).n_patterns();
    ok = ok && generic_bad == 0 && special == static_cast<std::size_t>(n - 1);
    detail += fmt("%sN=%d: generic %s, phi_S=-pi gives %zu (want %d)", n == 3 ? "" : "; ", n,
                  generic_bad ? "wrong" : "N", special, n - 1);
    if (n % 2 == 0) {
      // The count drops where an end of the open n_S interval is an integer,
      // i.e. phi_S = N pi mod 2 pi; for even N that is phi_S = 0.
      std::vector<double> zero(n, 0.0);
      detail += fmt(", phi_S=0 gives %zu",
                    enumerate_classes(scenarios::ring_model(n, zero, zero)).n_patterns());
    }
  }
  const double secs = since(t0);
  return {ok && secs < 5, fmt("%s (%.2f s)", detail.c_str(), secs)};
}

Outcome plug_back_residual() {
  const auto t0 = Clock::now();
  double worst = 0, worst_conditioned = 0, steepest = 0;
  std::size_t classes = 0, steep = 0;
  for (const NetworkModel& m : random_family(90, 100)) {
    for (const auto& c : enumerate_classes(m).classes) {
      if (!c.pattern) return {false, "class without a pattern " + seq(c.id)};
      const double r = plug_back(m, *c.pattern);
      worst = std::max(worst, r);
      // One rounding of an argument moves f_i by about f_i' * 2^-52 * |arg|;
      // above 1e-10 the bound cannot be met in double precision.
      const double floor = rounding_floor(m, *c.pattern);
      steepest = std::max(steepest, floor);
      if (floor > 1e-10) ++steep;
      else worst_conditioned = std::max(worst_conditioned, r);
      ++classes;
    }
  }
  const double secs = since(t0);
  return {worst < 1e-10 && secs < 60,
          fmt("%zu classes, max residual %.2e; %zu classes have a rounding floor above 1e-10 (largest %.1e), "
              "max residual over the rest %.2e, %.2f s",
              classes, worst, steep, steepest, worst_conditioned, secs)};
}

Outcome equivalence_oracle() {
  const auto t0 = Clock::now();
  std::size_t sequences = 0, disagreements = 0;
  for (const NetworkModel& m : random_family(90, 100)) {
    const PartitionAtlas atlas = enumerate_classes(m);
    // Partition by the equivalence test and by the solved patterns; both are
    // equivalence relations, so equal partitions mean agreement on every pair.
    std::vector<SequenceIndex> eq_reps;
    std::vector<CentralPattern> pat_reps;
    std::map<std::pair<int, int>, int> joint;
    std::vector<int> eq_label, pat_label;
    for (const auto& n : atlas.admissible) {
      int e = 0;
      while (e < static_cast<int>(eq_reps.size()) && !equivalent(m, eq_reps[e], n)) ++e;
      if (e == static_cast<int>(eq_reps.size())) eq_reps.push_back(n);
      const CentralPattern p = solve_pattern(m, n);
      int q = 0;
      while (q < static_cast<int>(pat_reps.size()) && !same_pattern(pat_reps[q], p)) ++q;
      if (q == static_cast<int>(pat_reps.size())) pat_reps.push_back(p);
      eq_label.push_back(e);
      pat_label.push_back(q);
      ++sequences;
    }
    // A bijection between labels exists iff each label pairs with exactly one other.
    std::map<int, std::set<int>> e2q, q2e;
    for (std::size_t k = 0; k < eq_label.size(); ++k) {
      e2q[eq_label[k]].insert(pat_label[k]);
      q2e[pat_label[k]].insert(eq_label[k]);
    }
    for (const auto& [_, s] : e2q) disagreements += s.size() - 1;
    for (const auto& [_, s] : q2e) disagreements += s.size() - 1;
  }
  const double secs = since(t0);
  return {disagreements == 0 && secs < 60,
          fmt("%zu sequences, %zu disagreements, %.2f s", sequences, disagreements, secs)};
}

Outcome invariance() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi), when(1.0, 19.0);
  double min_margin = INFINITY, drift = 0;
  int runs = 0, segments = 0;
  try {
    while (runs < 40) {
      const NetworkModel m = testing::random_model(rng, 2 + runs % 4, 3);
      std::vector<double> theta0(m.size());
      for (double& x : theta0) x = angle(rng);
      KickSchedule kicks;
      double t1 = when(rng), t2 = when(rng);
      if (t1 > t2) std::swap(t1, t2);
      for (double t : {t1, t2}) kicks.impulses.push_back({t, static_cast<NodeId>(1 + rng() % m.size()), angle(rng)});
      Trajectory tr;
      try {
        tr = integrate(m, theta0, 20.0, kicks);
      } catch (const Error& e) {
        // A state drawn on (or kicked onto) a pole is outside every cell.
        if (e.code() == ErrorCode::PoleHit) continue;
        throw;
      }
      const InvarianceReport r = verify_invariance(m, tr);
      min_margin = std::min(min_margin, r.min_margin);
      drift = std::max(drift, r.conserved_drift);
      segments += static_cast<int>(r.segment_cells.size());
      ++runs;
    }
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {min_margin > 0 && drift < 1e-8,
          fmt("%d runs, %d segments, min margin %.2e, drift %.2e", runs, segments, min_margin, drift)};
}

Outcome exact_graph_algebra() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(12);
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 5;
    const Digraph g = testing::random_connected_digraph(rng, n, 1 + trial % 4);
    const LeftNullVector z = left_null_vector(g);
    // (zeta^T L)_j = zeta_j d_j - sum_i zeta_i w(j -> i).
    std::vector<std::int64_t> row(n, 0);
    for (NodeId j = 1; j <= n; ++j) row[j - 1] = z.at(j) * g.in_degree(j);
    for (const Edge& e : g.edges()) row[e.src - 1] -= z.at(e.dst) * e.weight;
    const auto isccs = independent_sccs(g);
    bool ok = isccs.size() == 1 && isccs[0] == z.iscc_nodes;
    std::int64_t gcd = 0;
    for (NodeId i = 1; i <= n; ++i) {
      const bool in = std::count(z.iscc_nodes.begin(), z.iscc_nodes.end(), i) > 0;
      ok = ok && row[i - 1] == 0 && (in ? z.at(i) > 0 : z.at(i) == 0);
      gcd = std::gcd(gcd, z.at(i));
    }
    if (!ok || gcd != 1) ++bad;
  }
  const double secs = since(t0);
  return {bad == 0 && secs < 10, fmt("500 digraphs, %d failures, %.2f s", bad, secs)};
}

Outcome linearization() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double row_sum = 0, max_real = -INFINITY;
  int states = 0, attempts = 0;
  while (states < 50 && attempts < 200) {
    ++attempts;
    const NetworkModel m = testing::random_model(rng, 2 + attempts % 5, 3);
    std::vector<double> theta0(m.size());
    for (double& x : theta0) x = angle(rng);
    Trajectory tr;
    try {
      tr = integrate(m, theta0, 200.0);
    } catch (const Error&) {
      continue;
    }
    if (!detect_pattern(tr, m).converged) continue;
    const LinearizationReport r = linearization_check(m, tr.states.back());
    row_sum = std::max(row_sum, r.row_sum_residual);
    max_real = std::max(max_real, r.max_nontrivial_real);
    ++states;
  }
  return {states == 50 && row_sum < 1e-10 && max_real < -1e-9,
          fmt("%d states, max |J 1| %.2e, max nontrivial Re %.3e", states, row_sum, max_real)};
}

Outcome robustness() {
  // Unit ring of four in the synchronous class; omega_1 is pushed away from omega_bar.
  const std::vector<double> phi{0.2, -0.1, 0.3, -0.4}, base{0.3, -0.2, 0.1, 0.0};
  const SequenceIndex sync{0, 0, 0, 0};
  auto omega_bar = [&](double w1) {
    auto omega = base;
    omega[0] = w1;
    return solve_common_frequency(scenarios::ring_model(4, phi, omega), sync);
  };
  std::vector<double> sens;
  std::string detail;
  for (double offset : {1.0, 5.0, 25.0, 125.0}) {
    // w1 - omega_bar(w1) is increasing in w1.
    double lo = 0, hi = 4 * offset + 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid - omega_bar(mid) < offset ? lo : hi) = mid;
    }
    const double w1 = 0.5 * (lo + hi), h = 1e-4;
    sens.push_back((omega_bar(w1 + h) - omega_bar(w1 - h)) / (2 * h));
    detail += fmt("%s%g: %.4e", detail.empty() ? "" : ", ", offset, sens.back());
  }
  bool ok = true;
  for (std::size_t k = 1; k < sens.size(); ++k) ok = ok && sens[k] <= sens[k - 1];
  return {ok, "d omega_bar / d omega_1 at offsets " + detail};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"nine-node atlas", nine_node_atlas},
      {"phase-bias atlas", phase_bias_atlas},
      {"figure 3 runs", figure3},
      {"saturated runs", figure4b},
      {"kick switching", figure5},
      {"three-ring patterns", figure6},
      {"star patterns", figure7},
      {"ring counting", ring_counting},
      {"plug-back residual", plug_back_residual},
      {"equivalence oracle", equivalence_oracle},
      {"invariance", invariance},
      {"exact graph algebra", exact_graph_algebra},
      {"linearization", linearization},
      {"robustness", robustness},
  };
  return list;
}

bool run_one(int k) {
  const auto& [name, fn] = criteria()[k - 1];
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", k, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(criteria().size());
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > count) {
      std::fprintf(stderr, "usage: acceptance [1-%d]\n", count);
      return 2;
    }
    return run_one(k) ? 0 : 1;
  }
  bool all = true;
  for (int k = 1; k <= count; ++k) all = run_one(k) && all;
  return all ? 0 : 1;
}
