#pragma once

// Risk-bounded closed-loop RRT: tree expansion toward random samples with
// per-step covariance propagation and chance-constraint checks, goal
// connection with cost-to-go back-propagation, and path selection.

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/risk.hpp"
#include "chance_rrt/spatial.hpp"

namespace chance_rrt {

enum class PlannerMode { kPU, kCC, kCL };

std::string to_string(PlannerMode mode);
/// Accepts "pu", "cc", "cl" (case-insensitive). Throws DomainError otherwise.
PlannerMode parse_mode(const std::string& text);

struct PlanarBounds {
  double x_min = 0.0;
  double x_max = 100.0;
  double y_min = 0.0;
  double y_max = 10.5;

  bool contains(const Vec2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
};

struct PlannerConfig {
  PlannerMode mode = PlannerMode::kPU;
  double k_cc = 100.0;
  double k_dist = 1.0;
  int candidates = 15;             ///< M
  int max_iterations = 200;        ///< samples per expansion phase
  double expansion_interval = 3.0; ///< s, wall-clock cap when wall_clock_budget is set
  bool wall_clock_budget = false;
  double goal_radius = 2.0;
  double goal_bias = 0.05;
  double node_interval = 0.5;      ///< s of trajectory per tree node
  double replan_horizon = 1.0;     ///< s executed per planning cycle
  int max_cycles = 40;
  PlanarBounds sample_region;
  PlanarBounds drivable_region;
  double cc_fixed_sigma = 0.5;
  double pe_max = default_pe_max();
  double mi_max = default_mi_max();
  bool require_safe_stop = true;
  double safe_stop_dwell = 1.0;    ///< s the stopped state must stay within the bound
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TreeNode {
  int id = 0;
  int parent = -1;
  std::vector<int> children;
  StateBelief belief;
  double delta = 0.0;                  ///< collision-risk bound at this node
  std::vector<EgoState> trajectory;    ///< from parent (exclusive) to this node (inclusive)
  double time = 0.0;                   ///< s since the root
  double edge_cost = 0.0;
  double c_lb = 0.0;
  double c_ub = kInfinity;
  bool in_goal = false;

  Vec2 position() const { return belief.mean.position(); }
};

class PlanTree {
 public:
  PlanTree(const StateBelief& root, const Vec2& goal, double goal_radius);

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  TreeNode& node(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  const Vec2& goal() const { return goal_; }
  double goal_radius() const { return goal_radius_; }
  bool in_goal(const Vec2& p) const { return (p - goal_).norm() <= goal_radius_; }

  /// Appends a child and links it; fills id, c_lb, in_goal. Returns the id.
  int add_node(TreeNode node);

  /// Node ids from the root to `id`, inclusive.
  std::vector<int> path_to(int id) const;

  const std::vector<std::vector<int>>& goal_paths() const { return goal_paths_; }
  void record_goal_path(int goal_node_id);

 private:
  std::vector<TreeNode> nodes_;
  Vec2 goal_;
  double goal_radius_;
  std::vector<std::vector<int>> goal_paths_;
};

struct ExpansionBudget {
  int max_iterations = 200;
  /// Unset means no wall-clock limit.
  std::optional<std::chrono::duration<double>> wall_time;
};

struct ExpansionStats {
  int iterations = 0;
  int nodes_added = 0;
  int goal_paths_added = 0;
};

struct SelectedPath {
  std::vector<int> nodes;
  bool reaches_goal = false;
  double score = kInfinity;  ///< max C_UB along the path; infinite for fallbacks
};

/// k_cc * delta + k_dist * |node - sample|
double node_cost(const TreeNode& node, const Vec2& sample, const PlannerConfig& cfg);

/// k_cc * child.delta + k_dist * arc length of the child's trajectory.
double edge_cost(const TreeNode& parent, const TreeNode& child, const PlannerConfig& cfg);

/// Back-propagates cost-to-go upper bounds from `from_node_id` toward the root.
void update_cub(PlanTree& tree, int from_node_id);

/// Path with the lowest max-C_UB among recorded goal paths (ties: fewer nodes,
/// then lower index); otherwise root -> node with minimal C_LB.
SelectedPath select_path(const PlanTree& tree);

/// Obstacle view for the baselines: CC gets a fixed isotropic covariance, CL
/// gets none. Uncertainty-derived inflations are zeroed in both.
std::vector<ObstacleBelief> baseline_mode_transform(std::span<const ObstacleBelief> obstacles,
                                                    const PlannerConfig& cfg);

/// Collision-risk bound the planner assigns to an ego belief at `time`
/// seconds into the plan. In CL mode this is 0/1 deterministic overlap.
double planning_risk(const EgoState& state, const Mat2& cov, double time,
                     std::span<const ObstacleBelief> obstacles, PlannerMode mode,
                     const MotionConfig& motion, const RiskConfig& risk);

ExpansionStats expand_tree(PlanTree& tree, std::span<const ObstacleBelief> obstacles,
                           const PlannerConfig& cfg, const MotionConfig& motion,
                           const RiskConfig& risk, const ExpansionBudget& budget,
                           std::mt19937_64& rng);

}  // namespace chance_rrt
