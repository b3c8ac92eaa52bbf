#pragma once

// JSON encodings of models, couplings, patterns, atlases and run summaries,
// plus CSV export of trajectories. Every document carries "schema" and
// "version" fields; readers reject anything else with ErrorCode::Schema.

#include "bcpg/analysis.hpp"
#include "bcpg/design.hpp"
#include "bcpg/simulation.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace bcpg::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Numbers may be written as JSON numbers or as arithmetic strings such as
/// "-3*pi/4" or "1/tan(pi/2 - 1/40)" (operators + - * /, parentheses, pi,
/// tan, atan, sin, cos, sqrt).
double parse_number(const Json& j, const std::string& where);
double evaluate_expression(const std::string& text);

Json to_json(const Digraph& g);
Digraph graph_from_json(const Json& j);

Json to_json(const BarrierFunction& f);
BarrierFunction coupling_from_json(const Json& j);

/// Full model document.
Json to_json(const NetworkModel& m);
/// Accepts a model document, or the bare object without schema fields when
/// `embedded` is set. "couplings" may be one object shared by all nodes.
NetworkModel model_from_json(const Json& j, bool embedded = false);

Json to_json(const CentralPattern& p);
Json to_json(const NetworkModel& m, const PartitionAtlas& atlas);
Json to_json(const DetectedPattern& d);
Json to_json(const InvarianceReport& r);

TargetPattern target_from_json(const Json& j);
KickSchedule kicks_from_json(const Json& j);
std::vector<Edge> edge_list_from_json(const Json& j);

/// Checks "schema" == expected and a supported "version".
void require_schema(const Json& j, const std::string& expected);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Header t, theta_1..N, nu_1..N, u_1..N; values printed with %.17g.
std::string trajectory_csv(const Trajectory& tr);

/// Compact sequence rendering, e.g. "{0,1}".
std::string format_sequence(const SequenceIndex& n);

}  // namespace bcpg::io
