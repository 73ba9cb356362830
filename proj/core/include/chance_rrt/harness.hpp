#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chance_rrt/execute.hpp"
#include "chance_rrt/scenario.hpp"

namespace chance_rrt {

/// Table-style summary for one planner mode.
///
/// rate_succ_1: fraction of trials in which no cycle deadlocked (the planner
/// always produced an executable path). rate_succ_2: goal reached without a
/// ground-truth collision. rate_succ_3: as rate_succ_2 and every executed
/// step kept its risk bound below 1 - p_safe. Risks are pooled over all
/// executed steps of all trials.
struct ModeMetrics {
  PlannerMode mode = PlannerMode::kPU;
  int trials = 0;
  double rate_succ_1 = 0.0;
  double rate_succ_2 = 0.0;
  double rate_succ_3 = 0.0;
  double risk_max = 0.0;
  double risk_avg = 0.0;
  double n_waypoints = 0.0;    ///< mean over goal-reaching, collision-free trials; 0 if none
  double traj_length_m = 0.0;  ///< same trial set as n_waypoints
  double collision_rate = 0.0;
};

struct TrialResult {
  PlannerMode mode = PlannerMode::kPU;
  int trial = 0;
  std::uint64_t seed = 0;
  RunTrace trace;
};

struct BatchResult {
  std::vector<ModeMetrics> metrics;  ///< one per requested mode with >= 1 trial
  std::vector<TrialResult> trials;   ///< mode-major, then trial index
};

ModeMetrics summarize(PlannerMode mode, std::span<const RunTrace> traces, const RiskConfig& risk);

/// Trial i of every mode uses seed base_seed + i. `threads` <= 0 means
/// thread_cap_from_env().
BatchResult run_batch(const Scenario& scenario, std::span<const PlannerMode> modes, int trials,
                      std::uint64_t base_seed, int threads = 0);

/// CHANCE_RRT_THREADS if set to a positive integer, else hardware concurrency.
int thread_cap_from_env();

struct SweepCell {
  double distance = 0.0;
  double azimuth = 0.0;       ///< rad, relative bearing
  int detections = 0;         ///< frames that produced a detection
  BoxVector mean_var{};       ///< mean fused total variance per element
  BoxVector stderr_var{};     ///< standard error of that mean
};

/// Places one vehicle at each (distance, azimuth) around an ego at the
/// origin heading +x and fuses `frames` detections per cell. Misdetection and
/// clutter are switched off. Frame seeds depend on the distance index and the
/// frame only, so cells at +phi and -phi see identical noise draws.
std::vector<SweepCell> sense_sweep(const SweepConfig& cfg);

}  // namespace chance_rrt
