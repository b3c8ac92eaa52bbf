#pragma once

// Figure reproduction: fixed scenarios run end to end, with CSV, JSON and
// SVG written below an output directory.

#include "bcpg/analysis.hpp"
#include "bcpg/io.hpp"
#include "bcpg/simulation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bcpg::reproduce {

struct Options {
  double tol = 1e-9;
  /// Overrides each figure's own horizon.
  std::optional<double> t_end;
  std::filesystem::path out_dir = "out";
  bool write_files = true;
};

struct RunRecord {
  std::string label;
  std::vector<double> theta0;
  KickSchedule kicks;
  Trajectory trajectory;
  DetectedPattern detected;
  /// Class of the detected cell in the model's atlas, when one was found.
  std::optional<SequenceIndex> class_id;
  /// Analytic pattern of that class.
  std::optional<CentralPattern> analytic;
  double omega_error = 0.0;
  double delta_error = 0.0;
  double seconds = 0.0;
};

struct FigureResult {
  std::string name;
  std::string description;
  std::vector<RunRecord> runs;
  io::Json summary;
  std::vector<std::filesystem::path> files;
  double seconds = 0.0;
};

/// fig1, fig3, fig4a, fig4b, fig5, fig6, fig7.
const std::vector<std::string>& targets();

/// Throws InvalidArgument for unknown names.
FigureResult run(const std::string& target, const Options& options = {});

/// Every target, run concurrently; results in targets() order.
std::vector<FigureResult> run_all(const Options& options = {});

/// Simulates one initial condition, detects the pattern and compares it with
/// the analytic pattern of its class in `atlas`.
RunRecord simulate_and_classify(const NetworkModel& m, const PartitionAtlas& atlas, std::string label,
                                std::vector<double> theta0, double t_end, const KickSchedule& kicks = {},
                                double tol = 1e-9);

/// Largest circular distance between two phase vectors.
double max_angle_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bcpg::reproduce
