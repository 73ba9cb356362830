#pragma once

// Receding-horizon execution: perceive, filter, re-root the tree at the
// current belief, expand, select, then drive the first horizon of the chosen
// path on a simulated vehicle with process noise.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chance_rrt/planner.hpp"
#include "chance_rrt/scenario.hpp"

namespace chance_rrt {

enum class RunStatus { kGoalReached, kCollision, kTimeout };

std::string to_string(RunStatus status);

struct CycleRecord {
  int cycle = 0;
  double time = 0.0;            ///< s since the run started
  EgoState start;
  int detections = 0;           ///< fused objects, clutter included
  int clutter = 0;
  int rejected = 0;             ///< removed by the PE/MI filter (PU only)
  int rejected_clutter = 0;
  std::size_t tree_size = 0;
  int iterations = 0;
  int goal_paths = 0;
  bool reaches_goal = false;
  bool deadlock = false;        ///< selected path is the root alone
  double path_score = kInfinity;
  int executed_steps = 0;
  double max_step_risk = 0.0;
  std::vector<ObstacleBelief> perceived;  ///< PE/MI-filtered beliefs at cycle start
};

struct RunTrace {
  RunStatus status = RunStatus::kTimeout;
  EgoState start;
  std::vector<EgoState> executed;  ///< true states after each executed step
  std::vector<double> step_risk;   ///< analytic risk bound at each executed step
  std::vector<CycleRecord> cycles;
  bool collided = false;
  bool deadlocked = false;

  double length() const;
};

/// Called after every expansion with the fresh tree and the cycle index.
using ExpansionObserver = std::function<void(const PlanTree&, int)>;

/// Deterministic 64-bit mix of a base seed and two stream indices.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Runs one trial. `cfg.mode` selects PU / CC / CL. The reported per-step risk
/// always uses the PU evaluator on the PE/MI-filtered perceived beliefs.
RunTrace execute(const Scenario& scenario, const PlannerConfig& cfg, const MotionConfig& motion,
                 const RiskConfig& risk, std::uint64_t seed, const ExpansionObserver& observer = {});

}  // namespace chance_rrt
