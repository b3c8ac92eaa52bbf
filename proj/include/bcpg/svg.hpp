#pragma once

// Minimal SVG output: phase-difference plots and digraph drawings.

#include "bcpg/graph.hpp"
#include "bcpg/simulation.hpp"

#include <string>
#include <vector>

namespace bcpg::svg {

struct Panel {
  std::string title;
  const Trajectory* trajectory = nullptr;
};

/// One panel per run, stacked vertically; each plots theta_i - theta_1
/// against t for i = 2..N, with kick times marked.
std::string phase_differences(const std::vector<Panel>& panels);

/// Nodes on a circle, edges as arrows labelled with their weight when it
/// is not 1. Edges in `highlight` are drawn heavier.
std::string digraph(const Digraph& g, const std::vector<Edge>& highlight = {}, const std::string& title = "");

}  // namespace bcpg::svg
