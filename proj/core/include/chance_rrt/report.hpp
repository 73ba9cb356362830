#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "chance_rrt/harness.hpp"

namespace chance_rrt {

inline constexpr const char* kMetricsHeader =
    "mode,rate_succ_1,rate_succ_2,rate_succ_3,risk_max,risk_avg,n_waypoints,traj_length_m";

/// Header plus one row per entry with at least one trial.
std::string format_metrics_csv(std::span<const ModeMetrics> metrics);

/// One JSON object per planning cycle of every trial.
std::string format_trace_jsonl(std::span<const TrialResult> trials);

/// Uncertainty ellipse with semi-axes (L_a, L_b) in world meters.
std::string svg_ellipse(const ObstacleBelief& obstacle);

/// Lanes, ground truth at t = 0, first-cycle estimates and ellipses, and the
/// executed trajectory.
std::string render_svg(const Scenario& scenario, const RunTrace& trace);

std::string format_sweep_csv(std::span<const SweepCell> cells);

/// Writes metrics.csv, trace.jsonl and <mode>_trial_<i>.svg into `dir`,
/// creating it if needed. Throws IoError on failure.
void write_report(const std::filesystem::path& dir, const Scenario& scenario, const BatchResult& batch);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace chance_rrt
