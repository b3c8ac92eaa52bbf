// barrier-cpg: analyze, design and simulate barrier-coupled phase networks.

#include "bcpg/analysis.hpp"
#include "bcpg/design.hpp"
#include "bcpg/error.hpp"
#include "bcpg/io.hpp"
#include "bcpg/reproduce.hpp"
#include "bcpg/scenarios.hpp"
#include "bcpg/simulation.hpp"
#include "bcpg/svg.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace bcpg;
using io::Json;

namespace {

struct GlobalFlags {
  std::optional<double> tol;
  std::optional<double> t_end;
  std::uint64_t seed = 1;
  fs::path out_dir = "out";
};

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::Schema, what); }

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema: return 2;
    case ErrorCode::BudgetExceeded: return 3;
    case ErrorCode::PoleApproach: return 4;
    case ErrorCode::SignMismatch:
    case ErrorCode::InfeasibleOrdering:
    case ErrorCode::BoundExhausted:
    case ErrorCode::CannotSeparate: return 5;
    default: return 1;
  }
}

EnumerationOptions enumeration_options() {
  EnumerationOptions opt;
  if (const char* env = std::getenv("BARRIER_CPG_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) schema_error("BARRIER_CPG_BUDGET must be a positive integer");
    opt.budget = v;
  }
  return opt;
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// A scenario, a bare model document, or a design request carrying a model.
struct LoadedScenario {
  Json doc;
  NetworkModel model;
  fs::path dir;
};

NetworkModel model_from_scenario(const Json& doc, const fs::path& dir) {
  if (doc.contains("model_file")) {
    if (!doc["model_file"].is_string()) schema_error("model_file must be a string");
    fs::path p = doc["model_file"].get<std::string>();
    if (p.is_relative()) p = dir / p;
    const Json inner = io::read_json(p);
    if (inner.is_object() && inner.value("schema", "") == "barrier-cpg/scenario" && !inner.contains("model_file"))
      return model_from_scenario(inner, p.parent_path());
    return io::model_from_json(inner);
  }
  if (doc.contains("builtin")) {
    if (!doc["builtin"].is_string()) schema_error("builtin must be a string");
    try {
      return scenarios::model_by_name(doc["builtin"].get<std::string>());
    } catch (const Error& e) {
      schema_error(e.what());
    }
  }
  if (doc.contains("model")) {
    const Json& m = doc["model"];
    return io::model_from_json(m, !m.contains("schema"));
  }
  schema_error("scenario needs \"model\", \"model_file\" or \"builtin\"");
}

LoadedScenario load_scenario(const fs::path& path) {
  Json doc = io::read_json(path);
  const fs::path dir = path.parent_path();
  if (!doc.is_object() || !doc.contains("schema")) schema_error(path.string() + ": missing \"schema\"");
  if (doc["schema"] == "barrier-cpg/model") return {doc, io::model_from_json(doc), dir};
  io::require_schema(doc, "barrier-cpg/scenario");
  return {doc, model_from_scenario(doc, dir), dir};
}

std::vector<double> theta_from_json(const Json& j, int n, std::mt19937_64& rng) {
  if (j.is_string() && j.get<std::string>() == "random") {
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    std::vector<double> t(n);
    for (double& x : t) x = u(rng);
    return t;
  }
  if (!j.is_array()) schema_error("theta0 must be an array or \"random\"");
  std::vector<double> t;
  for (const Json& x : j) t.push_back(io::parse_number(x, "theta0"));
  if (static_cast<int>(t.size()) != n) schema_error("theta0 needs one entry per node");
  return t;
}

void print_atlas(const NetworkModel& m, const PartitionAtlas& atlas) {
  std::printf("N^P = %zu (realizable %zu, admissible sequences %zu)\n", atlas.n_patterns(), atlas.n_realizable(),
              atlas.admissible.size());
  std::printf("%-24s %-8s %-18s %s\n", "class", "members", "omega_bar", "delta");
  for (const PatternClass& c : atlas.classes) {
    std::string id = io::format_sequence(iscc_projection(m, c.id));
    std::printf("%-24s %-8zu ", id.c_str(), c.members.size());
    if (!c.pattern) {
      std::printf("%-18s %s\n", "-", c.unrealizable_reason.c_str());
      continue;
    }
    std::string delta = "[";
    for (std::size_t i = 0; i < c.pattern->delta.size(); ++i)
      delta += (i ? ", " : "") + fmt(c.pattern->delta[i], "%.6f");
    delta += "]";
    std::printf("%-18s %s\n", fmt(c.pattern->omega_bar).c_str(), delta.c_str());
  }
}

int cmd_analyze(const fs::path& file, const std::optional<fs::path>& output, const GlobalFlags& flags) {
  const LoadedScenario sc = load_scenario(file);
  const PartitionAtlas atlas = enumerate_classes(sc.model, enumeration_options());
  print_atlas(sc.model, atlas);
  const fs::path out = output.value_or(flags.out_dir / "atlas.json");
  io::write_text(out, io::to_json(sc.model, atlas).dump(2) + "\n");
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

int cmd_simulate(const fs::path& file, bool plot, const GlobalFlags& flags) {
  const LoadedScenario sc = load_scenario(file);
  const NetworkModel& m = sc.model;
  if (!sc.doc.contains("runs") || !sc.doc["runs"].is_array() || sc.doc["runs"].empty())
    schema_error("scenario needs a non-empty \"runs\" array");
  IntegrationOptions opt;
  if (sc.doc.contains("tol")) opt.tol = io::parse_number(sc.doc["tol"], "tol");
  if (flags.tol) opt.tol = *flags.tol;
  std::mt19937_64 rng(flags.seed);

  // Classes are attached only when the enumeration is cheap enough.
  std::optional<PartitionAtlas> atlas;
  try {
    atlas = enumerate_classes(m, enumeration_options());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
  }

  Json summary{{"schema", "barrier-cpg/summary"}, {"version", io::kSchemaVersion}, {"tol", opt.tol}};
  summary["runs"] = Json::array();
  std::vector<Trajectory> trajectories;
  std::vector<std::string> labels;
  int k = 0;
  for (const Json& r : sc.doc["runs"]) {
    ++k;
    const std::string label = r.value("label", "run" + std::to_string(k));
    const std::vector<double> theta0 = theta_from_json(r.contains("theta0") ? r["theta0"] : Json(), m.size(), rng);
    double t_end = r.contains("t_end") ? io::parse_number(r["t_end"], "t_end") : 100.0;
    if (flags.t_end) t_end = *flags.t_end;
    const KickSchedule kicks = io::kicks_from_json(r);
    Trajectory tr = integrate(m, theta0, t_end, kicks, opt);
    const DetectedPattern d = detect_pattern(tr, m);

    Json jr{{"label", label}, {"theta0", theta0}, {"t_end", t_end}};
    jr["detected"] = io::to_json(d);
    std::string cls = d.cls ? io::format_sequence(*d.cls) : "-";
    if (atlas && d.cls) {
      const int c = atlas->class_of(m, *d.cls);
      if (c >= 0) {
        jr["class_id"] = atlas->classes[c].id;
        cls = io::format_sequence(iscc_projection(m, atlas->classes[c].id));
      }
    }
    try {
      jr["invariance"] = io::to_json(verify_invariance(m, tr));
    } catch (const Error& e) {
      jr["invariance"] = {{"violated", e.what()}};
    }
    jr["steps"] = {{"accepted", tr.accepted_steps}, {"rejected", tr.rejected_steps}, {"forced", tr.forced_steps},
                   {"stalled", tr.stalled}};
    const fs::path csv = flags.out_dir / ("run" + std::to_string(k) + ".csv");
    io::write_text(csv, io::trajectory_csv(tr));
    jr["csv"] = csv.string();
    summary["runs"].push_back(jr);
    std::printf("%-28s omega_bar %-14s class %-16s %s\n", label.c_str(), fmt(d.omega_bar_est).c_str(), cls.c_str(),
                d.converged ? "converged" : "not converged");
    trajectories.push_back(std::move(tr));
    labels.push_back(label);
  }
  if (plot) {
    std::vector<svg::Panel> panels;
    for (std::size_t i = 0; i < trajectories.size(); ++i) panels.push_back({labels[i], &trajectories[i]});
    io::write_text(flags.out_dir / "phase.svg", svg::phase_differences(panels));
  }
  io::write_text(flags.out_dir / "summary.json", summary.dump(2) + "\n");
  std::printf("wrote %s\n", flags.out_dir.string().c_str());
  return 0;
}

std::vector<double> list_field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) schema_error(std::string("design: \"") + key + "\" must be an array");
  std::vector<double> v;
  for (const Json& x : doc[key]) v.push_back(io::parse_number(x, key));
  return v;
}

const Json& require(const Json& doc, const char* key) {
  if (!doc.contains(key)) schema_error(std::string("design: missing \"") + key + "\"");
  return doc[key];
}

int cmd_design(const fs::path& file, const std::optional<fs::path>& output, const GlobalFlags& flags) {
  const Json doc = io::read_json(file);
  io::require_schema(doc, "barrier-cpg/design");
  const std::string mode = require(doc, "mode").is_string() ? doc["mode"].get<std::string>() : "";
  Json report{{"schema", "barrier-cpg/design-report"}, {"version", io::kSchemaVersion}, {"mode", mode}};
  std::optional<NetworkModel> designed;

  if (mode == "saturate") {
    const NetworkModel m = model_from_scenario(doc, file.parent_path());
    const TargetPattern keep = io::target_from_json(require(doc, "keep"));
    const double margin = io::parse_number(require(doc, "margin"), "margin");
    const SaturationReport r = saturate_for_uniqueness(m, keep, margin, enumeration_options());
    report["kept_omega_bar"] = r.kept_omega_bar;
    report["shared_prototype"] = r.shared_prototype;
    report["bounds"] = r.bounds;
    report["excluded"] = r.excluded;
    report["surviving"] = r.surviving;
    report["realizable_classes"] = r.realizable_classes;
    designed = r.model;
  } else {
    const Digraph g = io::graph_from_json(require(doc, "graph"));
    if (mode == "minimal_subgraph") {
      const TargetPattern target = io::target_from_json(require(doc, "target"));
      const std::vector<Edge> required =
          doc.contains("candidates") ? io::edge_list_from_json(doc["candidates"]) : irrational_edges(g, target);
      const Digraph h = minimal_edge_subgraph(g, required);
      report["candidates"] = io::to_json(Digraph(g.node_count(), required))["edges"];
      report["subgraph"] = io::to_json(h);
      std::printf("subgraph with %zu edges:", h.edge_count());
      for (const Edge& e : h.edges()) std::printf(" %d->%d", e.src, e.dst);
      std::printf("\n");
    } else {
      const std::vector<double> omega = list_field(doc, "omega");
      if (mode == "phase_bias") {
        std::vector<BarrierFunction> f;
        const Json& cj = require(doc, "couplings");
        if (cj.is_object()) f.assign(g.node_count(), io::coupling_from_json(cj));
        else for (const Json& c : cj) f.push_back(io::coupling_from_json(c));
        const DesignSolution s = assign_by_phase_bias(g, omega, f, io::target_from_json(require(doc, "target")));
        report["certificate"] = s.certificate;
        report["max_residual"] = s.max_residual;
        designed = s.model;
      } else if (mode == "gains" || mode == "weights") {
        const std::vector<double> phi = list_field(doc, "phi");
        const BarrierFunction proto = io::coupling_from_json(require(doc, "prototype"));
        const TargetPattern target = io::target_from_json(require(doc, "target"));
        DesignSolution s = mode == "gains" ? assign_by_gains(g, omega, phi, proto, target)
                                           : design_weights(g, omega, phi, proto, target,
                                                            doc.contains("candidates")
                                                                ? std::optional(io::edge_list_from_json(doc["candidates"]))
                                                                : std::nullopt,
                                                            doc.value("max_alpha", std::int64_t{1000}));
        report["certificate"] = s.certificate;
        report["max_residual"] = s.max_residual;
        report["notes"] = s.notes;
        designed = s.model;
      } else if (mode == "multi_pattern") {
        const std::vector<double> phi = list_field(doc, "phi");
        std::vector<TargetPattern> patterns;
        for (const Json& p : require(doc, "patterns")) patterns.push_back(io::target_from_json(p));
        const MultiPatternCheck check = multi_pattern_feasible(g, phi, patterns);
        report["order"] = check.order;
        report["theta"] = check.theta;
        NetworkModel m(g, omega, phi, construct_multi_pattern_couplings(g, phi, omega, patterns));
        Json res = Json::array();
        for (const auto& p : patterns) res.push_back(pattern_residuals(m, p));
        report["residuals"] = res;
        designed = m;
      } else {
        schema_error("design: unknown mode \"" + mode + "\"");
      }
    }
  }
  if (designed) {
    const fs::path out = output.value_or(flags.out_dir / "model.json");
    io::write_text(out, io::to_json(*designed).dump(2) + "\n");
    report["model_file"] = out.string();
    std::printf("wrote %s\n", out.string().c_str());
  }
  io::write_text(flags.out_dir / "design_report.json", report.dump(2) + "\n");
  return 0;
}

int cmd_reproduce(const std::string& target, const GlobalFlags& flags) {
  reproduce::Options opt;
  if (flags.tol) opt.tol = *flags.tol;
  opt.t_end = flags.t_end;
  opt.out_dir = flags.out_dir;
  std::vector<reproduce::FigureResult> results;
  if (target == "all") results = reproduce::run_all(opt);
  else results.push_back(reproduce::run(target, opt));
  for (const auto& r : results) {
    std::printf("%s: %s (%.2f s)\n", r.name.c_str(), r.description.c_str(), r.seconds);
    for (const auto& run : r.runs) {
      std::printf("  %-34s omega_bar %-14s class %-22s", run.label.c_str(), fmt(run.detected.omega_bar_est).c_str(),
                  run.class_id ? io::format_sequence(*run.class_id).c_str() : "-");
      if (run.analytic) std::printf(" |dw| %.2e |dDelta| %.2e", run.omega_error, run.delta_error);
      std::printf("%s\n", run.detected.converged ? "" : "  (not converged)");
    }
    if (r.name == "fig1") std::printf("  %s\n", r.summary["designed"]["graph"]["edges"].dump().c_str());
    for (const auto& f : r.files) std::printf("  wrote %s\n", f.string().c_str());
  }
  return 0;
}

int cmd_classify(const fs::path& file, const std::vector<std::string>& theta_text) {
  const LoadedScenario sc = load_scenario(file);
  const NetworkModel& m = sc.model;
  std::vector<double> theta;
  for (const auto& t : theta_text) theta.push_back(io::evaluate_expression(t));
  if (static_cast<int>(theta.size()) != m.size()) schema_error("--theta needs one value per node");
  const SequenceIndex n = classify_state(m, theta);
  Json out{{"cell", n}, {"margin", cell_margin(m, theta, lifted_cell(m, theta))}};
  try {
    const PartitionAtlas atlas = enumerate_classes(m, enumeration_options());
    const int c = atlas.class_of(m, n);
    if (c >= 0) {
      out["class_id"] = atlas.classes[c].id;
      if (atlas.classes[c].pattern) out["pattern"] = io::to_json(*atlas.classes[c].pattern);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    out["class_id"] = nullptr;
  }
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

int cmd_builtin(const std::string& name, const std::optional<fs::path>& output) {
  if (name.empty()) {
    for (const auto& n : scenarios::names()) std::printf("%s\n", n.c_str());
    return 0;
  }
  const std::string text = io::to_json(scenarios::model_by_name(name)).dump(2) + "\n";
  if (output) io::write_text(*output, text);
  else std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyze, design and simulate phase networks with barrier couplings"};
  app.require_subcommand(1);
  GlobalFlags flags;
  double tol = 0, t_end = 0;
  auto* tol_opt = app.add_option("--tol", tol, "integration tolerance")->check(CLI::PositiveNumber);
  auto* t_end_opt = app.add_option("--t-end", t_end, "simulation horizon, overrides scenario values")
                        ->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "seed for random initial conditions");
  app.add_option("--out-dir", flags.out_dir, "output directory")->capture_default_str();

  fs::path file;
  std::optional<fs::path> output;
  std::string target, builtin_name;
  bool no_plot = false;
  std::vector<std::string> theta;

  auto* analyze = app.add_subcommand("analyze", "enumerate central patterns and write the atlas");
  analyze->add_option("scenario", file, "scenario or model JSON")->required();
  analyze->add_option("-o,--output", output, "atlas path (default OUT_DIR/atlas.json)");

  auto* simulate = app.add_subcommand("simulate", "integrate the runs of a scenario");
  simulate->add_option("scenario", file, "scenario JSON")->required();
  simulate->add_flag("--no-plot", no_plot, "skip the SVG phase plot");

  auto* design = app.add_subcommand("design", "synthesize a model from a design request");
  design->add_option("request", file, "design request JSON")->required();
  design->add_option("-o,--output", output, "model path (default OUT_DIR/model.json)");

  auto* repro = app.add_subcommand("reproduce", "regenerate a figure");
  std::vector<std::string> choices = reproduce::targets();
  choices.push_back("all");
  repro->add_option("target", target, "figure")->required()->check(CLI::IsMember(choices));

  auto* classify = app.add_subcommand("classify", "cell and class of a state");
  classify->add_option("scenario", file, "scenario or model JSON")->required();
  classify->add_option("--theta", theta, "phases, numbers or expressions such as pi/2")->required()->delimiter(',');

  auto* builtin = app.add_subcommand("builtin", "print a built-in model (no name lists them)");
  builtin->add_option("name", builtin_name);
  builtin->add_option("-o,--output", output, "write to a file");

  CLI11_PARSE(app, argc, argv);
  if (*tol_opt) flags.tol = tol;
  if (*t_end_opt) flags.t_end = t_end;

  try {
    if (*analyze) return cmd_analyze(file, output, flags);
    if (*simulate) return cmd_simulate(file, !no_plot, flags);
    if (*design) return cmd_design(file, output, flags);
    if (*repro) return cmd_reproduce(target, flags);
    if (*classify) return cmd_classify(file, theta);
    if (*builtin) return cmd_builtin(builtin_name, output);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.code());
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "error: Schema: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
