#include "bcpg/reproduce.hpp"

#include "bcpg/error.hpp"
#include "bcpg/scenarios.hpp"
#include "bcpg/svg.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>

namespace bcpg::reproduce {

namespace {

using Clock = std::chrono::steady_clock;
using scenarios::NineNodeVariant;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

io::Json run_json(const RunRecord& r) {
  io::Json j;
  j["label"] = r.label;
  j["theta0"] = r.theta0;
  j["t_end"] = r.trajectory.times.empty() ? 0.0 : r.trajectory.times.back();
  j["kicks"] = r.trajectory.events.size();
  j["detected"] = io::to_json(r.detected);
  if (r.class_id) j["class_id"] = io::format_sequence(*r.class_id);
  if (r.analytic) {
    j["analytic"] = io::to_json(*r.analytic);
    j["omega_error"] = r.omega_error;
    j["delta_error"] = r.delta_error;
  }
  j["steps"] = {{"accepted", r.trajectory.accepted_steps},
                {"rejected", r.trajectory.rejected_steps},
                {"forced", r.trajectory.forced_steps},
                {"stalled", r.trajectory.stalled}};
  j["seconds"] = r.seconds;
  return j;
}

struct SimulationSpec {
  std::string label;
  std::vector<double> theta0;
  KickSchedule kicks;
};

FigureResult simulation_figure(const std::string& name, const std::string& description, const NetworkModel& m,
                               const std::vector<SimulationSpec>& specs, double t_end, const Options& options) {
  const auto t0 = Clock::now();
  FigureResult out;
  out.name = name;
  out.description = description;
  const PartitionAtlas atlas = enumerate_classes(m);
  const double horizon = options.t_end.value_or(t_end);
  for (const auto& s : specs)
    out.runs.push_back(simulate_and_classify(m, atlas, s.label, s.theta0, horizon, s.kicks, options.tol));

  out.summary["figure"] = name;
  out.summary["description"] = description;
  out.summary["model"] = io::to_json(m);
  out.summary["n_patterns"] = atlas.n_patterns();
  out.summary["n_realizable"] = atlas.n_realizable();
  out.summary["runs"] = io::Json::array();
  for (const auto& r : out.runs) out.summary["runs"].push_back(run_json(r));
  out.seconds = since(t0);
  out.summary["seconds"] = out.seconds;

  if (options.write_files) {
    const auto dir = options.out_dir / name;
    std::vector<svg::Panel> panels;
    for (std::size_t k = 0; k < out.runs.size(); ++k) {
      const auto csv = dir / ("run" + std::to_string(k + 1) + ".csv");
      io::write_text(csv, io::trajectory_csv(out.runs[k].trajectory));
      out.files.push_back(csv);
      panels.push_back({out.runs[k].label, &out.runs[k].trajectory});
    }
    const auto plot = dir / (name + ".svg");
    io::write_text(plot, svg::phase_differences(panels));
    const auto atlas_file = dir / "atlas.json";
    io::write_text(atlas_file, io::to_json(m, atlas).dump(2) + "\n");
    const auto summary = dir / "summary.json";
    io::write_text(summary, out.summary.dump(2) + "\n");
    out.files.insert(out.files.end(), {plot, atlas_file, summary});
  }
  return out;
}

std::vector<SimulationSpec> plain(const std::vector<scenarios::InitialCondition>& ics) {
  std::vector<SimulationSpec> specs;
  for (const auto& ic : ics) specs.push_back({ic.label, ic.theta0, {}});
  return specs;
}

FigureResult fig1(const Options& options) {
  const auto t0 = Clock::now();
  const Digraph g = scenarios::example_graph();
  const TargetPattern target = scenarios::example_target();
  const auto omega = scenarios::nine_node_omega();
  const auto phi = scenarios::nine_node_phi();
  const auto preferred = irrational_edges(g, target);
  const Digraph skeleton = minimal_edge_subgraph(g, preferred);
  const DesignSolution sol = design_weights(g, omega, phi, BarrierFunction::tan_half(1.0), target, preferred);

  FigureResult out;
  out.name = "fig1";
  out.description = "minimal edge subgraph and integer weights for the example target";
  io::Json j;
  j["figure"] = out.name;
  j["description"] = out.description;
  j["graph"] = io::to_json(g);
  j["irrational_edges"] = io::Json::array();
  for (const Edge& e : preferred) j["irrational_edges"].push_back({e.src, e.dst});
  j["subgraph"] = io::to_json(skeleton);
  j["designed"] = io::to_json(sol.model);
  j["max_residual"] = sol.max_residual;
  j["notes"] = sol.notes;
  out.seconds = since(t0);
  j["seconds"] = out.seconds;
  out.summary = j;

  if (options.write_files) {
    const auto dir = options.out_dir / out.name;
    std::vector<Edge> kept(sol.model.graph().edges().begin(), sol.model.graph().edges().end());
    const auto full = dir / "graph.svg";
    io::write_text(full, svg::digraph(g, kept, "example graph, designed edges highlighted"));
    const auto designed = dir / "fig1.svg";
    io::write_text(designed, svg::digraph(sol.model.graph(), preferred, "designed subgraph"));
    const auto model = dir / "model.json";
    io::write_text(model, io::to_json(sol.model).dump(2) + "\n");
    const auto summary = dir / "summary.json";
    io::write_text(summary, j.dump(2) + "\n");
    out.files = {full, designed, model, summary};
  }
  return out;
}

FigureResult fig5(const Options& options) {
  const NetworkModel m = scenarios::two_agent_model();
  KickSchedule train;
  train.persistent = PersistentExcitation{2, 0.25, 20.0, 0.0, 100.0};
  std::vector<SimulationSpec> specs;
  for (const auto& ic : scenarios::two_agent_initial_conditions()) specs.push_back({ic.label + ", no kicks", ic.theta0, {}});
  for (const auto& ic : scenarios::two_agent_initial_conditions())
    specs.push_back({ic.label + ", kick train on 2", ic.theta0, train});
  return simulation_figure("fig5", "two agents, near-boundary pattern left by a persistent impulse train", m, specs,
                           200.0, options);
}

}  // namespace

double max_angle_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(reduce_angle(a[i] - b[i])));
  return worst;
}

RunRecord simulate_and_classify(const NetworkModel& m, const PartitionAtlas& atlas, std::string label,
                                std::vector<double> theta0, double t_end, const KickSchedule& kicks, double tol) {
  const auto t0 = Clock::now();
  RunRecord r;
  r.label = std::move(label);
  r.theta0 = std::move(theta0);
  r.kicks = kicks;
  IntegrationOptions opt;
  opt.tol = tol;
  r.trajectory = integrate(m, r.theta0, t_end, kicks, opt);
  r.detected = detect_pattern(r.trajectory, m);
  if (r.detected.cls) {
    const int k = atlas.class_of(m, *r.detected.cls);
    if (k >= 0) {
      const PatternClass& c = atlas.classes[k];
      r.class_id = c.id;
      r.analytic = c.pattern;
    }
  }
  if (r.analytic) {
    r.omega_error = std::abs(r.detected.omega_bar_est - r.analytic->omega_bar);
    r.delta_error = max_angle_error(r.detected.delta_est, r.analytic->delta);
  }
  r.seconds = since(t0);
  return r;
}

const std::vector<std::string>& targets() {
  static const std::vector<std::string> names{"fig1", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7"};
  return names;
}

FigureResult run(const std::string& target, const Options& options) {
  if (target == "fig1") return fig1(options);
  if (target == "fig3")
    return simulation_figure("fig3", "nine-node network, gains on tan(s/2)",
                             scenarios::nine_node_model(NineNodeVariant::Gains),
                             plain(scenarios::nine_node_initial_conditions()), 150.0, options);
  if (target == "fig4a")
    return simulation_figure("fig4a", "nine-node network, phase biases +-1/25 and unit weights",
                             scenarios::nine_node_model(NineNodeVariant::PhaseBias),
                             plain(scenarios::nine_node_initial_conditions()), 100.0, options);
  if (target == "fig4b")
    return simulation_figure("fig4b", "nine-node network, saturated couplings",
                             scenarios::nine_node_model(NineNodeVariant::Saturated),
                             plain(scenarios::nine_node_initial_conditions()), 100.0, options);
  if (target == "fig5") return fig5(options);
  if (target == "fig6")
    return simulation_figure("fig6", "directed three-ring with two assigned rotations", scenarios::three_ring_model(),
                             plain(scenarios::three_ring_initial_conditions()), 60.0, options);
  if (target == "fig7")
    return simulation_figure("fig7", "star with N = 9, balanced and synchronized patterns", scenarios::star_model(9),
                             plain(scenarios::star_initial_conditions(9)), 400.0, options);
  throw Error(ErrorCode::InvalidArgument, "unknown reproduce target '" + target + "'");
}

std::vector<FigureResult> run_all(const Options& options) {
  std::vector<std::future<FigureResult>> jobs;
  for (const auto& t : targets()) jobs.push_back(std::async(std::launch::async, [t, &options] { return run(t, options); }));
  std::vector<FigureResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace bcpg::reproduce
