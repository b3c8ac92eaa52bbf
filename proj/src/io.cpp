#include "bcpg/io.hpp"

#include "bcpg/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bcpg::io {

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::Schema, what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) schema_error(where + ": missing \"" + key + "\"");
  return j.at(key);
}

// Recursive descent over the small expression grammar.
class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { schema_error("bad expression \"" + s_ + "\": " + why); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = product();
    for (;;) {
      if (accept('+'))
        v += product();
      else if (accept('-'))
        v -= product();
      else
        return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      if (accept('*'))
        v *= unary();
      else if (accept('/'))
        v /= unary();
      else
        return v;
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return atom();
  }

  double atom() {
    skip();
    if (accept('(')) {
      const double v = sum();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "pi") return std::numbers::pi;
      if (!accept('(')) fail("expected '(' after " + name);
      const double arg = sum();
      if (!accept(')')) fail("missing ')'");
      if (name == "tan") return std::tan(arg);
      if (name == "atan") return std::atan(arg);
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      if (name == "sqrt") return std::sqrt(arg);
      fail("unknown function " + name);
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::int64_t integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where + ": expected an integer");
  return j.get<std::int64_t>();
}

Json sequence_json(const SequenceIndex& n) { return Json(n); }

}  // namespace

double evaluate_expression(const std::string& text) { return ExpressionParser(text).parse(); }

double parse_number(const Json& j, const std::string& where) {
  double v = 0.0;
  if (j.is_number())
    v = j.get<double>();
  else if (j.is_string())
    v = evaluate_expression(j.get<std::string>());
  else
    schema_error(where + ": expected a number or expression string");
  if (!std::isfinite(v)) schema_error(where + ": value is not finite");
  return v;
}

void require_schema(const Json& j, const std::string& expected) {
  if (!j.is_object()) schema_error("document must be a JSON object");
  if (!j.contains("schema") || !j["schema"].is_string() || j["schema"].get<std::string>() != expected)
    schema_error("expected schema \"" + expected + "\"");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion)
    schema_error("unsupported version for " + expected);
}

Json to_json(const Digraph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.src, e.dst, e.weight});
  return Json{{"nodes", g.node_count()}, {"edges", edges}};
}

Digraph graph_from_json(const Json& j) {
  const int n = static_cast<int>(integer(field(j, "nodes", "graph"), "graph.nodes"));
  std::vector<Edge> edges = edge_list_from_json(field(j, "edges", "graph"));
  try {
    return Digraph(n, std::move(edges));
  } catch (const Error& e) {
    schema_error(std::string("graph: ") + e.what());
  }
}

std::vector<Edge> edge_list_from_json(const Json& j) {
  if (!j.is_array()) schema_error("edges: expected an array");
  std::vector<Edge> edges;
  for (const Json& e : j) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) schema_error("edge must be [src, dst] or [src, dst, weight]");
    edges.push_back({static_cast<NodeId>(integer(e[0], "edge src")), static_cast<NodeId>(integer(e[1], "edge dst")),
                     e.size() == 3 ? integer(e[2], "edge weight") : 1});
  }
  return edges;
}

Json to_json(const BarrierFunction& f) {
  struct Visitor {
    Json operator()(const TanHalf& t) const { return {{"kind", "tan_half"}, {"gain", t.gain}, {"offset", t.offset}}; }
    Json operator()(const ScaledPrototype& p) const {
      return {{"kind", "scaled"}, {"g", p.g}, {"prototype", to_json(*p.prototype)}};
    }
    Json operator()(const ShiftedScaledTanHalf& t) const {
      return {{"kind", "shifted_scaled_tan_half"}, {"gain", t.gain}, {"shift", t.shift}, {"denom", t.denom},
              {"offset", t.offset}};
    }
    Json operator()(const Saturated& s) const {
      return {{"kind", "saturated"}, {"inner", to_json(*s.inner)}, {"m_minus", s.m_minus}, {"m_plus", s.m_plus},
              {"delta", s.delta}};
    }
    Json operator()(const MonotonePiecewise& p) const {
      Json knots = Json::array();
      for (std::size_t k = 0; k < p.s.size(); ++k) knots.push_back({p.s[k], p.y[k]});
      return {{"kind", "monotone_piecewise"}, {"knots", knots}};
    }
  };
  return std::visit(Visitor{}, f.variant());
}

BarrierFunction coupling_from_json(const Json& j) {
  const std::string kind = field(j, "kind", "coupling").is_string() ? j["kind"].get<std::string>() : "";
  auto num = [&](const char* key, double fallback, bool required) {
    if (!j.contains(key)) {
      if (required) schema_error("coupling " + kind + ": missing \"" + key + "\"");
      return fallback;
    }
    return parse_number(j[key], "coupling." + std::string(key));
  };
  try {
    if (kind == "tan_half") return BarrierFunction::tan_half(num("gain", 1.0, false), num("offset", 0.0, false));
    if (kind == "scaled")
      return BarrierFunction::scaled(num("g", 1.0, true), coupling_from_json(field(j, "prototype", "coupling")));
    if (kind == "shifted_scaled_tan_half")
      return BarrierFunction::shifted_scaled_tan_half(num("gain", 1.0, false), num("shift", 0.0, false),
                                                      num("denom", 1.0, false), num("offset", 0.0, false));
    if (kind == "saturated")
      return saturate(coupling_from_json(field(j, "inner", "coupling")), num("m_minus", 0, true),
                      num("m_plus", 0, true), num("delta", 0, true));
    if (kind == "monotone_piecewise") {
      std::vector<std::pair<double, double>> knots;
      for (const Json& k : field(j, "knots", "coupling")) {
        if (!k.is_array() || k.size() != 2) schema_error("knot must be [s, y]");
        knots.emplace_back(parse_number(k[0], "knot s"), parse_number(k[1], "knot y"));
      }
      return BarrierFunction::monotone_piecewise(knots);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema_error(std::string("coupling: ") + e.what());
  }
  schema_error("unknown coupling kind \"" + kind + "\"");
}

Json to_json(const NetworkModel& m) {
  Json couplings = Json::array();
  for (const auto& f : m.couplings()) couplings.push_back(to_json(f));
  return Json{{"schema", "barrier-cpg/model"}, {"version", kSchemaVersion}, {"graph", to_json(m.graph())},
              {"omega", m.omega()},         {"phi", m.phi()},             {"couplings", couplings}};
}

NetworkModel model_from_json(const Json& j, bool embedded) {
  if (!embedded) require_schema(j, "barrier-cpg/model");
  if (!j.is_object()) schema_error("model must be an object");
  Digraph g = graph_from_json(field(j, "graph", "model"));
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<double> omega = number_list(field(j, "omega", "model"), "model.omega");
  std::vector<double> phi = number_list(field(j, "phi", "model"), "model.phi");
  const Json& cj = field(j, "couplings", "model");
  std::vector<BarrierFunction> f;
  if (cj.is_object()) {
    f.assign(n, coupling_from_json(cj));
  } else if (cj.is_array()) {
    for (const Json& c : cj) f.push_back(coupling_from_json(c));
  } else {
    schema_error("model.couplings must be an object or an array");
  }
  if (omega.size() != n || phi.size() != n || f.size() != n)
    schema_error("model: omega, phi and couplings need one entry per node");
  try {
    return NetworkModel(std::move(g), std::move(omega), std::move(phi), std::move(f));
  } catch (const Error& e) {
    schema_error(std::string("model: ") + e.what());
  }
}

Json to_json(const CentralPattern& p) {
  return Json{{"omega_bar", p.omega_bar},   {"delta", p.delta},       {"delta_edges", p.delta_edges},
              {"sequence", p.sequence},     {"class_id", p.class_id}, {"residual", p.residual}};
}

Json to_json(const NetworkModel& m, const PartitionAtlas& atlas) {
  const NsInterval ns = ns_interval(m);
  Json classes = Json::array();
  for (const PatternClass& c : atlas.classes) {
    Json members = Json::array();
    Json projections = Json::array();
    std::vector<SequenceIndex> seen;
    for (std::size_t k : c.members) {
      members.push_back(sequence_json(atlas.admissible[k]));
      SequenceIndex p = iscc_projection(m, atlas.admissible[k]);
      if (std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
    }
    std::sort(seen.begin(), seen.end());
    for (const auto& p : seen) projections.push_back(sequence_json(p));
    Json cj{{"id", c.id}, {"iscc_members", projections}, {"member_count", c.members.size()}};
    if (c.pattern) {
      cj["omega_bar"] = c.pattern->omega_bar;
      cj["delta"] = c.pattern->delta;
      cj["delta_edges"] = c.pattern->delta_edges;
      cj["residual"] = c.pattern->residual;
    } else {
      cj["unrealizable"] = c.unrealizable_reason;
    }
    cj["members"] = members;
    classes.push_back(cj);
  }
  std::vector<SequenceIndex> projections;
  for (const auto& n : atlas.admissible) {
    SequenceIndex p = iscc_projection(m, n);
    if (std::find(projections.begin(), projections.end(), p) == projections.end()) projections.push_back(p);
  }
  std::sort(projections.begin(), projections.end());
  return Json{{"schema", "barrier-cpg/atlas"},
              {"version", kSchemaVersion},
              {"n_patterns", atlas.n_patterns()},
              {"n_realizable", atlas.n_realizable()},
              {"candidates", atlas.candidates},
              {"admissible_count", atlas.admissible.size()},
              {"iscc_nodes", m.zeta().iscc_nodes},
              {"zeta", m.zeta().zeta},
              {"ns_interval",
               {{"lower", to_string(ns.lower)}, {"upper", to_string(ns.upper)}, {"count", ns.count}}},
              {"iscc_admissible", projections},
              {"classes", classes}};
}

Json to_json(const DetectedPattern& d) {
  Json j{{"omega_bar", d.omega_bar_est}, {"delta", d.delta_est},          {"converged", d.converged},
         {"residual", d.residual},       {"near_boundary", d.near_boundary}, {"min_margin", d.min_margin},
         {"window", d.window}};
  j["class"] = d.cls ? Json(*d.cls) : Json(nullptr);
  return j;
}

Json to_json(const InvarianceReport& r) {
  return Json{{"min_margin", r.min_margin}, {"conserved_drift", r.conserved_drift}, {"segment_cells", r.segment_cells}};
}

TargetPattern target_from_json(const Json& j) {
  TargetPattern t;
  t.omega_bar = parse_number(field(j, "omega_bar", "target"), "target.omega_bar");
  t.delta = number_list(field(j, "delta", "target"), "target.delta");
  return t;
}

KickSchedule kicks_from_json(const Json& j) {
  KickSchedule k;
  if (j.contains("kicks")) {
    for (const Json& e : j["kicks"])
      k.impulses.push_back({parse_number(field(e, "time", "kick"), "kick.time"),
                            static_cast<NodeId>(integer(field(e, "node", "kick"), "kick.node")),
                            parse_number(field(e, "shift", "kick"), "kick.shift")});
  }
  if (j.contains("persistent")) {
    const Json& p = j["persistent"];
    PersistentExcitation pe;
    pe.node = static_cast<NodeId>(integer(field(p, "node", "persistent"), "persistent.node"));
    pe.amplitude = parse_number(field(p, "amplitude", "persistent"), "persistent.amplitude");
    pe.period = parse_number(field(p, "period", "persistent"), "persistent.period");
    if (p.contains("start")) pe.start = parse_number(p["start"], "persistent.start");
    if (p.contains("stop")) pe.stop = parse_number(p["stop"], "persistent.stop");
    k.persistent = pe;
  }
  return k;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot open " + path.string());
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    schema_error(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  for (const char* prefix : {"theta_", "nu_", "u_"})
    for (std::size_t i = 1; i <= n; ++i) out += "," + std::string(prefix) + std::to_string(i);
  out += "\n";
  char buf[32];
  for (std::size_t s = 0; s < tr.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", tr.times[s]);
    out += buf;
    for (const auto* row : {&tr.states[s], &tr.nu_args[s], &tr.inputs[s]}) {
      for (double v : *row) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

std::string format_sequence(const SequenceIndex& n) {
  std::string s = "{";
  for (std::size_t k = 0; k < n.size(); ++k) s += (k ? "," : "") + std::to_string(n[k]);
  return s + "}";
}

}  // namespace bcpg::io
